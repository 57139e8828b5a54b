#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace pinch::nn {

// Dense H x W x C activation volume, index (h * W + w) * C + c.
struct FeatureMap {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(std::size_t h, std::size_t w, std::size_t c) : height(h), width(w), channels(c), data(h * w * c, 0.0) {}

    double& at(std::size_t h, std::size_t w, std::size_t c) { return data[(h * width + w) * channels + c]; }
    double at(std::size_t h, std::size_t w, std::size_t c) const { return data[(h * width + w) * channels + c]; }
};

// 2x2 convolution bank; weights indexed [f][i][j][c].
struct ConvLayer {
    std::size_t filters = 0;
    std::size_t channels = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    static constexpr std::size_t kernel = 2;

    ConvLayer() = default;
    ConvLayer(std::size_t f, std::size_t c) : filters(f), channels(c), weights(f * kernel * kernel * c, 0.0), bias(f, 0.0) {}

    double& w(std::size_t f, std::size_t i, std::size_t j, std::size_t c)
    {
        return weights[((f * kernel + i) * kernel + j) * channels + c];
    }
    double w(std::size_t f, std::size_t i, std::size_t j, std::size_t c) const
    {
        return weights[((f * kernel + i) * kernel + j) * channels + c];
    }
};

// Fully connected layer; weights indexed [out][in].
struct DenseLayer {
    std::size_t outputs = 0;
    std::size_t inputs = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    DenseLayer() = default;
    DenseLayer(std::size_t out, std::size_t in) : outputs(out), inputs(in), weights(out * in, 0.0), bias(out, 0.0) {}
};

// Trainable parameters in their fixed serialisation order.
struct CnnParams {
    ConvLayer conv1;
    ConvLayer conv2;
    ConvLayer conv3;
    DenseLayer dense1;
    DenseLayer out;

    // conv1.w, conv1.b, conv2.w, conv2.b, conv3.w, conv3.b, dense1.w, dense1.b, out.w, out.b
    std::vector<std::span<double>> blocks();
    std::vector<std::span<const double>> blocks() const;

    // Same shapes, all zero.
    CnnParams zeros_like() const;
};

// Per-column standardisation of the (Re, Im) feature matrix.
struct NormStats {
    double mean_re = 0.0;
    double std_re = 1.0;
    double mean_im = 0.0;
    double std_im = 1.0;
};

inline constexpr std::uint16_t model_format_version = 1;

struct CnnModel {
    CnnParams params;
    double dropout_rate = 0.25;
    NormStats norm;
    std::size_t trained_k = 0;
    std::uint16_t version = model_format_version;
};

inline constexpr std::size_t conv1_filters = 8;
inline constexpr std::size_t conv2_filters = 16;
inline constexpr std::size_t conv3_filters = 32;
inline constexpr std::size_t dense_units = 64;

// Architecture for K users with all parameters zero.
CnnModel make_model(std::size_t users);

// Glorot-uniform weights, zero biases.
void init_glorot(CnnModel& model, std::uint64_t seed);

// "Same" 2x2 cross-correlation: the input is zero-padded by one row at the
// bottom and one column at the right so H x W is preserved.
FeatureMap conv2d_same(const FeatureMap& input, const ConvLayer& layer);

double relu(double x);
FeatureMap relu(FeatureMap x);

enum class Mode { train, infer };

// Activations kept for the backward pass.
struct ForwardCache {
    FeatureMap input;
    FeatureMap z1, a1, z2, a2, z3, a3;
    std::vector<double> z4, a4, mask, dropped, output;
};

// K x 2 standardised features (rows in SIC order) -> K outputs.
std::vector<double> forward(const CnnModel& model, const FeatureMap& x, Mode mode, std::mt19937_64& rng,
                            ForwardCache* cache = nullptr);

// Deterministic inference (dropout off).
std::vector<double> forward(const CnnModel& model, const FeatureMap& x);

double mae_loss(std::span<const double> pred, std::span<const double> target);
// Subgradient sign(p - t) / K with sign(0) = 0.
std::vector<double> mae_grad(std::span<const double> pred, std::span<const double> target);

// Accumulates d loss / d params for one sample into `grads` (same shapes as
// model.params) given d loss / d output.
void backward(const CnnModel& model, const ForwardCache& cache, std::span<const double> dloss_dout, CnnParams& grads);

} // namespace pinch::nn
