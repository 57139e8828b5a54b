#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pinch/core_model.hpp"
#include "pinch/montecarlo.hpp"
#include "pinch/neural/dataset.hpp"
#include "pinch/neural/training.hpp"

namespace pinch::io {

// Shortest text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// One row per (sample, user): sample_id,k,re_g,im_g,q_target,P_w,sigma2_w,M,K
inline constexpr const char* dataset_header = "sample_id,k,re_g,im_g,q_target,P_w,sigma2_w,M,K";
std::string dataset_csv(const nn::Dataset& data);
nn::Dataset parse_dataset_csv(const std::string& text);

// scheme,sweep_var,sweep_value,trial,seed,sum_rate_bpshz,min_rate_bpshz,outage,wall_ms
// wall_ms is written as 0 unless `timing` is set, so reruns stay byte-identical.
inline constexpr const char* results_header =
    "scheme,sweep_var,sweep_value,trial,seed,sum_rate_bpshz,min_rate_bpshz,outage,wall_ms";
std::string results_csv(const mc::ExperimentResult& result, bool timing = false);

struct ResultRow {
    std::string scheme;
    std::string sweep_var;
    double sweep_value = 0.0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double sum_rate = 0.0;
    double min_rate = 0.0;
    bool outage = false;
    double wall_ms = 0.0;
};
std::vector<ResultRow> parse_results_csv(const std::string& text);

// fold,epoch,train_mae,val_mae
std::string curves_csv(const nn::TrainResult& result);

// Per (scheme, sweep value): trial count, mean and 95% interval of the sum
// rate, mean min rate, outage probability and sum-rate boxplot; plus failures.
std::string summary_json(const mc::ExperimentResult& result);

// Complex gains as a two-column CSV: re_g,im_g (one user per row).
std::vector<cplx> parse_gains_csv(const std::string& text);

} // namespace pinch::io
