#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pinch/core_model.hpp"
#include "pinch/neural/cnn.hpp"
#include "pinch/neural/dataset.hpp"
#include "pinch/power_alloc.hpp"

namespace pinch::nn {

struct TrainConfig {
    double lr = 1e-3;
    std::size_t batch = 200;
    std::size_t epochs = 64;
    std::size_t folds = 5;
    double decay = 0.96;
    std::size_t decay_every = 10;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t patience = 8;
    double min_delta = 1e-6;
    std::uint64_t seed = 1;

    void validate() const;
};

struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::size_t step = 0;
};

// decay^floor(step / decay_every)
double lr_multiplier(std::size_t step, const TrainConfig& config);

// One bias-corrected ADAM update of every parameter block.
void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state, const TrainConfig& config);

struct FoldCurve {
    std::vector<double> train_mae;
    std::vector<double> val_mae;
    double best_val_mae = 0.0;
    std::size_t best_epoch = 0;  // 1-based
};

struct TrainResult {
    CnnModel model;
    std::vector<FoldCurve> folds;
    std::size_t best_fold = 0;
};

// K-fold training with early stopping; the returned model is the fold model
// with the lowest validation MAE. Losses are in units of the power budget.
TrainResult train(const Dataset& data, const TrainConfig& config);

// Mean MAE (budget fractions) of `model` over the given samples.
double evaluate_mae(const CnnModel& model, const Dataset& data, std::span<const std::size_t> indices);

// Raw network prediction in watts, indexed by user.
std::vector<double> predict_power(const CnnModel& model, std::span<const cplx> gains, double total_power_w);

// Network prediction followed by the simplex projection.
PowerAllocation infer_allocation(const CnnModel& model, const ChannelState& state, double total_power_w);

} // namespace pinch::nn
