#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pinch/core_model.hpp"
#include "pinch/montecarlo.hpp"
#include "pinch/neural/dataset.hpp"
#include "pinch/neural/training.hpp"
#include "pinch/placement.hpp"

namespace pinch {

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct ExperimentSection {
    std::vector<mc::Scheme> schemes = {mc::Scheme::cnn_noma, mc::Scheme::c_noma, mc::Scheme::fpa_noma,
                                       mc::Scheme::pa_oma, mc::Scheme::c_oma};
    mc::SweepVar sweep_var = mc::SweepVar::snr_db;
    std::vector<double> sweep_values = {10.0, 20.0, 30.0};
    std::size_t trials = 100;
    double target_rate_bpshz = 0.0;
    // Table I grid
    std::size_t grid_points = 12;
    std::vector<std::size_t> table_users = {3, 4};
    std::vector<double> table_snr_db = {10.0, 20.0};
    // Directory holding model_K<k>.pcnn files for K sweeps.
    std::string model_dir;
};

// Every knob of one run. Placement guard and bounds follow the system
// geometry unless given explicitly.
struct RunConfig {
    SystemConfig system;
    PlacementParams placement;
    bool placement_guard_set = false;
    bool placement_bounds_set = false;
    nn::TrainConfig train;
    nn::DatasetOptions dataset;
    ExperimentSection experiment;
    std::uint64_t seed = 1;

    // Placement parameters with derived geometry filled in.
    PlacementParams resolved_placement() const;
    // Propagates `seed` into the train, dataset and experiment streams.
    void set_seed(std::uint64_t s);
};

// Parses a JSON document with optional sections "system", "placement",
// "train", "dataset" and "experiment" plus a top-level "seed". Unknown keys
// and type mismatches throw ConfigError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Fully populated document (every key with its value).
std::string dump_config(const RunConfig& config);

} // namespace pinch
