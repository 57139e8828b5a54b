#include "pinch/neural/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "pinch/errors.hpp"
#include "pinch/rng.hpp"

namespace pinch::nn {

void TrainConfig::validate() const
{
    if (!(lr > 0.0)) {
        throw ConfigError("train.lr: must be > 0");
    }
    if (batch < 1) {
        throw ConfigError("train.batch: must be >= 1");
    }
    if (folds < 2) {
        throw ConfigError("train.folds: must be >= 2");
    }
    if (!(decay > 0.0 && decay <= 1.0)) {
        throw ConfigError("train.decay: must lie in (0, 1]");
    }
    if (decay_every < 1) {
        throw ConfigError("train.decay_every: must be >= 1");
    }
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw ConfigError("train.adam betas: must lie in [0, 1)");
    }
    if (!(adam_eps > 0.0)) {
        throw ConfigError("train.adam_eps: must be > 0");
    }
}

double lr_multiplier(std::size_t step, const TrainConfig& config)
{
    return std::pow(config.decay, static_cast<double>(step / config.decay_every));
}

void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state, const TrainConfig& config)
{
    if (params.size() != grads.size()) {
        throw ShapeError("adam_step: parameter/gradient block count mismatch");
    }
    if (state.m.size() != params.size()) {
        state.m.assign(params.size(), {});
        state.v.assign(params.size(), {});
        for (std::size_t b = 0; b < params.size(); ++b) {
            state.m[b].assign(params[b].size(), 0.0);
            state.v[b].assign(params[b].size(), 0.0);
        }
    }
    const double lr = config.lr * lr_multiplier(state.step, config);
    const double t = static_cast<double>(state.step + 1);
    const double c1 = 1.0 - std::pow(config.adam_beta1, t);
    const double c2 = 1.0 - std::pow(config.adam_beta2, t);
    for (std::size_t b = 0; b < params.size(); ++b) {
        if (params[b].size() != grads[b].size() || state.m[b].size() != params[b].size()) {
            throw ShapeError("adam_step: block " + std::to_string(b) + " size mismatch");
        }
        auto& m = state.m[b];
        auto& v = state.v[b];
        for (std::size_t i = 0; i < params[b].size(); ++i) {
            const double g = grads[b][i];
            m[i] = config.adam_beta1 * m[i] + (1.0 - config.adam_beta1) * g;
            v[i] = config.adam_beta2 * v[i] + (1.0 - config.adam_beta2) * g * g;
            params[b][i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config.adam_eps);
        }
    }
    ++state.step;
}

namespace {

struct Prepared {
    std::vector<FeatureMap> x;
    std::vector<std::vector<double>> y;
};

Prepared prepare(const Dataset& data, const NormStats& norm)
{
    Prepared p;
    p.x.reserve(data.size());
    p.y.reserve(data.size());
    for (const auto& s : data.samples) {
        p.x.push_back(make_features(s.gains, norm));
        p.y.push_back(make_target(s));
    }
    return p;
}

double mean_mae(const CnnModel& model, const Prepared& p, std::span<const std::size_t> indices)
{
    if (indices.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (auto i : indices) {
        acc += mae_loss(forward(model, p.x[i]), p.y[i]);
    }
    return acc / static_cast<double>(indices.size());
}

void scale(CnnParams& g, double s)
{
    for (auto block : g.blocks()) {
        for (auto& v : block) {
            v *= s;
        }
    }
}

} // namespace

double evaluate_mae(const CnnModel& model, const Dataset& data, std::span<const std::size_t> indices)
{
    return mean_mae(model, prepare(data, model.norm), indices);
}

TrainResult train(const Dataset& data, const TrainConfig& config)
{
    config.validate();
    const std::size_t n = data.size();
    if (n < config.folds) {
        throw DataTooSmall("dataset has " + std::to_string(n) + " samples for " + std::to_string(config.folds) +
                           " folds");
    }
    const std::size_t users = data.users();
    for (const auto& s : data.samples) {
        if (s.gains.size() != users || s.target_q.size() != users) {
            throw ShapeError("dataset mixes different user counts");
        }
    }

    const NormStats norm = compute_norm_stats(data);
    const Prepared prepared = prepare(data, norm);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(mix_seed(config.seed, 1));
    std::shuffle(perm.begin(), perm.end(), shuffle_rng);

    TrainResult result;
    double best_overall = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < config.folds; ++f) {
        const std::size_t lo = f * n / config.folds;
        const std::size_t hi = (f + 1) * n / config.folds;
        std::vector<std::size_t> val(perm.begin() + static_cast<std::ptrdiff_t>(lo),
                                     perm.begin() + static_cast<std::ptrdiff_t>(hi));
        std::vector<std::size_t> fit;
        fit.reserve(n - val.size());
        fit.insert(fit.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(lo));
        fit.insert(fit.end(), perm.begin() + static_cast<std::ptrdiff_t>(hi), perm.end());

        CnnModel model = make_model(users);
        init_glorot(model, mix_seed(config.seed, 2, f));
        model.norm = norm;
        AdamState adam;
        std::mt19937_64 rng(mix_seed(config.seed, 3, f));

        FoldCurve curve;
        curve.best_val_mae = std::numeric_limits<double>::infinity();
        CnnParams best_params = model.params;
        std::size_t stale = 0;
        ForwardCache cache;

        for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
            std::shuffle(fit.begin(), fit.end(), rng);
            double epoch_loss = 0.0;
            for (std::size_t start = 0; start < fit.size(); start += config.batch) {
                const std::size_t end = std::min(fit.size(), start + config.batch);
                CnnParams grads = model.params.zeros_like();
                for (std::size_t b = start; b < end; ++b) {
                    const auto i = fit[b];
                    const auto pred = forward(model, prepared.x[i], Mode::train, rng, &cache);
                    epoch_loss += mae_loss(pred, prepared.y[i]);
                    backward(model, cache, mae_grad(pred, prepared.y[i]), grads);
                }
                scale(grads, 1.0 / static_cast<double>(end - start));
                const auto gb = std::as_const(grads).blocks();
                adam_step(model.params.blocks(), gb, adam, config);
            }
            curve.train_mae.push_back(fit.empty() ? 0.0 : epoch_loss / static_cast<double>(fit.size()));
            const double v = mean_mae(model, prepared, val);
            curve.val_mae.push_back(v);
            if (v < curve.best_val_mae - config.min_delta) {
                curve.best_val_mae = v;
                curve.best_epoch = epoch;
                best_params = model.params;
                stale = 0;
            } else if (++stale >= config.patience) {
                break;
            }
        }
        model.params = std::move(best_params);
        if (curve.best_val_mae < best_overall) {
            best_overall = curve.best_val_mae;
            result.best_fold = f;
            result.model = model;
        }
        result.folds.push_back(std::move(curve));
    }
    return result;
}

std::vector<double> predict_power(const CnnModel& model, std::span<const cplx> gains, double total_power_w)
{
    if (gains.size() != model.trained_k) {
        throw ShapeError("model trained for K=" + std::to_string(model.trained_k) + ", got " +
                         std::to_string(gains.size()) + " users");
    }
    const auto state = make_channel_state({gains.begin(), gains.end()});
    const auto out = forward(model, make_features(gains, model.norm));
    std::vector<double> q(gains.size());
    for (std::size_t r = 0; r < out.size(); ++r) {
        q[state.sic_order[r]] = out[r] * total_power_w;
    }
    return q;
}

PowerAllocation infer_allocation(const CnnModel& model, const ChannelState& state, double total_power_w)
{
    const auto q_hat = predict_power(model, state.gains, total_power_w);
    return simplex_project(q_hat, total_power_w).q_proj;
}

} // namespace pinch::nn
