#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pinch/core_model.hpp"
#include "pinch/neural/cnn.hpp"
#include "pinch/placement.hpp"

namespace pinch::nn {

// One (channel, max-min label) pair. Gains and targets are indexed by user.
struct Sample {
    std::uint64_t id = 0;
    std::vector<cplx> gains;
    std::vector<double> target_q;  // watts
    double total_power_w = 0.0;
    double noise_power_w = 0.0;
    std::size_t antennas = 0;
};

enum class Split { train, test };

struct Dataset {
    std::vector<Sample> samples;
    Split split = Split::train;

    std::size_t size() const { return samples.size(); }
    std::size_t users() const { return samples.empty() ? 0 : samples.front().gains.size(); }
};

// Where antennas sit when a sample is drawn.
enum class PlacementMode { optimized, fixed };
// Physical pinching-antenna channels, or i.i.d. CN(0, eta / d^2) draws.
enum class ChannelSource { physical, gaussian };

struct DatasetOptions {
    std::size_t n_train = 4500;
    std::size_t n_test = 500;
    PlacementMode placement = PlacementMode::optimized;
    ChannelSource source = ChannelSource::physical;
    std::uint64_t seed = 1;
    std::size_t resample_cap = 100;
};

std::pair<Dataset, Dataset> generate_dataset(const SystemConfig& config, const PlacementParams& params,
                                             const DatasetOptions& options);

// Column mean / std of (Re g, Im g) pooled over every user of every sample.
NormStats compute_norm_stats(const Dataset& data);

// K x 2 x 1 standardised feature map; rows follow ascending |g|^2.
FeatureMap make_features(std::span<const cplx> gains, const NormStats& norm);

// Label as budget fractions in the same ascending-|g|^2 row order.
std::vector<double> make_target(const Sample& sample);

} // namespace pinch::nn
