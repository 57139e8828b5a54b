#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pinch/core_model.hpp"
#include "pinch/neural/cnn.hpp"
#include "pinch/placement.hpp"

namespace pinch::mc {

enum class Scheme { cnn_noma, c_noma, fpa_noma, pa_oma, c_oma };

std::string_view scheme_name(Scheme s);
// Accepts "CNN-NOMA", "C-NOMA", "FPA-NOMA", "PA-OMA", "C-OMA" (case-insensitive).
Scheme parse_scheme(std::string_view name);

enum class SweepVar { antennas, users, snr_db, d1, target_rate, alpha };

std::string_view sweep_name(SweepVar v);
// "M", "K", "snr_db", "D1", "target_rate", "alpha".
SweepVar parse_sweep(std::string_view name);

// Noise fixed, P = sigma^2 * 10^(snr_db / 10).
double power_from_snr_db(double snr_db, double noise_power_w);

using ModelMap = std::map<std::size_t, std::shared_ptr<const nn::CnnModel>>;

// Trained CNN models keyed by K, looked up for CNN-NOMA.
struct ExperimentSpec {
    std::vector<Scheme> schemes;
    SweepVar sweep_var = SweepVar::snr_db;
    std::vector<double> sweep_values;
    std::size_t trials = 1;
    std::uint64_t base_seed = 1;
    SystemConfig system;
    PlacementParams placement;
    // Re-derive guard (lambda/2) and bounds ([-D1/2, D1/2]) per sweep point.
    bool derive_placement_geometry = true;
    // Far-user outage threshold for non-target sweeps (bps/Hz).
    double target_rate = 0.0;
    ModelMap models;
    std::size_t workers = 1;

    void validate() const;
};

struct MetricsRecord {
    Scheme scheme = Scheme::c_noma;
    double sweep_value = 0.0;
    std::size_t sweep_index = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double sum_rate = 0.0;
    double min_rate = 0.0;
    double far_user_rate = 0.0;
    std::vector<double> user_rates;
    bool outage = false;
    double wall_ms = 0.0;
};

struct TrialFailure {
    std::size_t sweep_index = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::string message;
};

struct ExperimentResult {
    SweepVar sweep_var = SweepVar::snr_db;
    std::vector<MetricsRecord> records;
    std::vector<TrialFailure> failures;
};

struct SchemeOutcome {
    std::vector<double> rates;       // by user
    std::vector<double> gain_power;  // |g|^2 seen by each user under the scheme
    std::size_t far_user = 0;        // argmin gain_power
};

// Everything one scheme evaluation needs for a layout. The optimised
// placement is shared between CNN-NOMA and FPA-NOMA when supplied.
struct SchemeContext {
    const SystemConfig* system = nullptr;
    const PlacementParams* placement = nullptr;
    const nn::CnnModel* model = nullptr;
    const AntennaPlacement* optimized = nullptr;
};

SchemeOutcome scheme_rate(Scheme scheme, const UserLayout& layout, const SchemeContext& ctx);

// Sweep x trial grid, every scheme evaluated on the same layout per cell.
// Per-trial seed = mix_seed(base_seed, sweep_index, trial); target_rate
// sweeps reuse sweep_index 0 so every target sees the same layouts.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct OutageCurve {
    std::vector<double> targets;
    std::map<Scheme, std::vector<double>> probability;  // per target
};

// Far-user (weakest effective gain) outage: fraction of trials with R_far < target.
OutageCurve outage_curve(const ExperimentSpec& spec, std::span<const double> targets);
OutageCurve outage_from_records(std::span<const MetricsRecord> records, std::span<const double> targets);

struct BoxplotStats {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double whisker_lo = 0.0;
    double whisker_hi = 0.0;
    std::vector<double> outliers;
};

// Linear interpolation between closest ranks, h = (n - 1) p.
double quantile(std::vector<double> samples, double p);
BoxplotStats boxplot_stats(std::span<const double> samples);

struct AlphaStudy {
    std::vector<double> alphas;
    std::vector<std::vector<double>> delta_sr;  // [alpha][layout]
    std::vector<std::vector<double>> sr_init;
    std::vector<std::vector<double>> sr_final;
    std::vector<BoxplotStats> stats;
};

// Stage I at each alpha then Stage II, on the same `layouts` layouts for every alpha.
AlphaStudy alpha_study(const SystemConfig& system, const PlacementParams& params, std::size_t layouts,
                       std::span<const double> alphas, std::uint64_t base_seed, std::size_t workers = 1);

struct Table1Cell {
    std::size_t users = 0;
    double snr_db = 0.0;
    double mean_sr_it = 0.0;
    double mean_sr_bf = 0.0;
    double mrg = 0.0;
    double xrg = 0.0;
    std::vector<double> gaps;
};

// Iterative placement vs brute force on a G-point grid with M = K.
std::vector<Table1Cell> table1_validation(const SystemConfig& base, const PlacementParams& params,
                                          std::span<const std::size_t> users, std::span<const double> snrs_db,
                                          std::size_t trials, std::size_t grid_points, std::uint64_t base_seed,
                                          std::size_t workers = 1);

// Applies one sweep value to a scenario.
void apply_sweep(SweepVar var, double value, SystemConfig& system, PlacementParams& params, double& target_rate);

} // namespace pinch::mc
