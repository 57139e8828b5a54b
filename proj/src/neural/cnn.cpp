#include "pinch/neural/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pinch/errors.hpp"

namespace pinch::nn {

std::vector<std::span<double>> CnnParams::blocks()
{
    return {conv1.weights, conv1.bias, conv2.weights, conv2.bias, conv3.weights,
            conv3.bias,    dense1.weights, dense1.bias, out.weights,  out.bias};
}

std::vector<std::span<const double>> CnnParams::blocks() const
{
    return {conv1.weights, conv1.bias, conv2.weights, conv2.bias, conv3.weights,
            conv3.bias,    dense1.weights, dense1.bias, out.weights,  out.bias};
}

CnnParams CnnParams::zeros_like() const
{
    CnnParams z;
    z.conv1 = ConvLayer(conv1.filters, conv1.channels);
    z.conv2 = ConvLayer(conv2.filters, conv2.channels);
    z.conv3 = ConvLayer(conv3.filters, conv3.channels);
    z.dense1 = DenseLayer(dense1.outputs, dense1.inputs);
    z.out = DenseLayer(out.outputs, out.inputs);
    return z;
}

CnnModel make_model(std::size_t users)
{
    if (users == 0) {
        throw ShapeError("model needs K >= 1");
    }
    CnnModel model;
    model.trained_k = users;
    model.params.conv1 = ConvLayer(conv1_filters, 1);
    model.params.conv2 = ConvLayer(conv2_filters, conv1_filters);
    model.params.conv3 = ConvLayer(conv3_filters, conv2_filters);
    model.params.dense1 = DenseLayer(dense_units, users * 2 * conv3_filters);
    model.params.out = DenseLayer(users, dense_units);
    return model;
}

void init_glorot(CnnModel& model, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    auto fill = [&](std::vector<double>& w, double fan_in, double fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (auto& v : w) {
            v = dist(rng);
        }
    };
    auto conv = [&](ConvLayer& l) {
        const double area = ConvLayer::kernel * ConvLayer::kernel;
        fill(l.weights, area * static_cast<double>(l.channels), area * static_cast<double>(l.filters));
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    };
    auto dense = [&](DenseLayer& l) {
        fill(l.weights, static_cast<double>(l.inputs), static_cast<double>(l.outputs));
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    };
    conv(model.params.conv1);
    conv(model.params.conv2);
    conv(model.params.conv3);
    dense(model.params.dense1);
    dense(model.params.out);
}

FeatureMap conv2d_same(const FeatureMap& input, const ConvLayer& layer)
{
    if (input.channels != layer.channels) {
        throw ShapeError("conv2d: input has " + std::to_string(input.channels) + " channels, filters expect " +
                         std::to_string(layer.channels));
    }
    if (input.data.size() != input.height * input.width * input.channels ||
        layer.weights.size() != layer.filters * 4 * layer.channels || layer.bias.size() != layer.filters) {
        throw ShapeError("conv2d: inconsistent tensor sizes");
    }
    FeatureMap out(input.height, input.width, layer.filters);
    for (std::size_t h = 0; h < input.height; ++h) {
        for (std::size_t w = 0; w < input.width; ++w) {
            for (std::size_t f = 0; f < layer.filters; ++f) {
                double acc = layer.bias[f];
                for (std::size_t i = 0; i < ConvLayer::kernel && h + i < input.height; ++i) {
                    for (std::size_t j = 0; j < ConvLayer::kernel && w + j < input.width; ++j) {
                        for (std::size_t c = 0; c < input.channels; ++c) {
                            acc += input.at(h + i, w + j, c) * layer.w(f, i, j, c);
                        }
                    }
                }
                out.at(h, w, f) = acc;
            }
        }
    }
    return out;
}

double relu(double x)
{
    return x > 0.0 ? x : 0.0;
}

FeatureMap relu(FeatureMap x)
{
    for (auto& v : x.data) {
        v = relu(v);
    }
    return x;
}

namespace {

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> in)
{
    std::vector<double> out(layer.bias);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
        const double* row = layer.weights.data() + o * layer.inputs;
        double acc = 0.0;
        for (std::size_t i = 0; i < layer.inputs; ++i) {
            acc += row[i] * in[i];
        }
        out[o] += acc;
    }
    return out;
}

// Accumulates weight/bias gradients; returns d loss / d input.
std::vector<double> dense_backward(const DenseLayer& layer, std::span<const double> in, std::span<const double> dout,
                                   DenseLayer& grad)
{
    std::vector<double> din(layer.inputs, 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
        const double g = dout[o];
        if (g == 0.0) {
            continue;
        }
        grad.bias[o] += g;
        const double* row = layer.weights.data() + o * layer.inputs;
        double* grow = grad.weights.data() + o * layer.inputs;
        for (std::size_t i = 0; i < layer.inputs; ++i) {
            grow[i] += g * in[i];
            din[i] += g * row[i];
        }
    }
    return din;
}

FeatureMap conv_backward(const ConvLayer& layer, const FeatureMap& in, const FeatureMap& dout, ConvLayer& grad)
{
    FeatureMap din(in.height, in.width, in.channels);
    for (std::size_t h = 0; h < in.height; ++h) {
        for (std::size_t w = 0; w < in.width; ++w) {
            for (std::size_t f = 0; f < layer.filters; ++f) {
                const double g = dout.at(h, w, f);
                if (g == 0.0) {
                    continue;
                }
                grad.bias[f] += g;
                for (std::size_t i = 0; i < ConvLayer::kernel && h + i < in.height; ++i) {
                    for (std::size_t j = 0; j < ConvLayer::kernel && w + j < in.width; ++j) {
                        for (std::size_t c = 0; c < in.channels; ++c) {
                            grad.w(f, i, j, c) += g * in.at(h + i, w + j, c);
                            din.at(h + i, w + j, c) += g * layer.w(f, i, j, c);
                        }
                    }
                }
            }
        }
    }
    return din;
}

FeatureMap relu_backward(const FeatureMap& z, FeatureMap dout)
{
    for (std::size_t i = 0; i < z.data.size(); ++i) {
        if (!(z.data[i] > 0.0)) {
            dout.data[i] = 0.0;
        }
    }
    return dout;
}

} // namespace

std::vector<double> forward(const CnnModel& model, const FeatureMap& x, Mode mode, std::mt19937_64& rng,
                            ForwardCache* cache)
{
    if (x.height != model.trained_k || x.width != 2 || x.channels != 1) {
        throw ShapeError("forward: expected a " + std::to_string(model.trained_k) + "x2x1 input");
    }
    const auto& p = model.params;
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c.input = x;
    c.z1 = conv2d_same(x, p.conv1);
    c.a1 = relu(c.z1);
    c.z2 = conv2d_same(c.a1, p.conv2);
    c.a2 = relu(c.z2);
    c.z3 = conv2d_same(c.a2, p.conv3);
    c.a3 = relu(c.z3);
    c.z4 = dense_forward(p.dense1, c.a3.data);
    c.a4.resize(c.z4.size());
    std::transform(c.z4.begin(), c.z4.end(), c.a4.begin(), [](double v) { return relu(v); });

    c.mask.assign(c.a4.size(), 1.0);
    if (mode == Mode::train && model.dropout_rate > 0.0) {
        const double keep = 1.0 - model.dropout_rate;
        std::bernoulli_distribution coin(keep);
        for (auto& m : c.mask) {
            m = coin(rng) ? 1.0 / keep : 0.0;
        }
    }
    c.dropped.resize(c.a4.size());
    for (std::size_t i = 0; i < c.a4.size(); ++i) {
        c.dropped[i] = c.a4[i] * c.mask[i];
    }
    c.output = dense_forward(p.out, c.dropped);
    return c.output;
}

std::vector<double> forward(const CnnModel& model, const FeatureMap& x)
{
    std::mt19937_64 unused(0);
    return forward(model, x, Mode::infer, unused, nullptr);
}

double mae_loss(std::span<const double> pred, std::span<const double> target)
{
    if (pred.size() != target.size() || pred.empty()) {
        throw ShapeError("mae_loss: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        acc += std::abs(pred[k] - target[k]);
    }
    return acc / static_cast<double>(pred.size());
}

std::vector<double> mae_grad(std::span<const double> pred, std::span<const double> target)
{
    if (pred.size() != target.size() || pred.empty()) {
        throw ShapeError("mae_grad: length mismatch");
    }
    const double scale = 1.0 / static_cast<double>(pred.size());
    std::vector<double> g(pred.size());
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double d = pred[k] - target[k];
        g[k] = d > 0.0 ? scale : (d < 0.0 ? -scale : 0.0);
    }
    return g;
}

void backward(const CnnModel& model, const ForwardCache& cache, std::span<const double> dloss_dout, CnnParams& grads)
{
    const auto& p = model.params;
    auto d_dropped = dense_backward(p.out, cache.dropped, dloss_dout, grads.out);
    std::vector<double> d_z4(d_dropped.size());
    for (std::size_t i = 0; i < d_z4.size(); ++i) {
        d_z4[i] = cache.z4[i] > 0.0 ? d_dropped[i] * cache.mask[i] : 0.0;
    }
    auto d_a3 = dense_backward(p.dense1, cache.a3.data, d_z4, grads.dense1);
    FeatureMap g3(cache.a3.height, cache.a3.width, cache.a3.channels);
    g3.data = std::move(d_a3);
    auto d_z3 = relu_backward(cache.z3, std::move(g3));
    auto d_a2 = conv_backward(p.conv3, cache.a2, d_z3, grads.conv3);
    auto d_z2 = relu_backward(cache.z2, std::move(d_a2));
    auto d_a1 = conv_backward(p.conv2, cache.a1, d_z2, grads.conv2);
    auto d_z1 = relu_backward(cache.z1, std::move(d_a1));
    conv_backward(p.conv1, cache.input, d_z1, grads.conv1);
}

} // namespace pinch::nn
