#include "pinch/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace pinch::oracle {

namespace {

constexpr double pivot_eps = 1e-12;

// Tableau for A x - s + r = b over columns [x | s | r | rhs].
class Simplex {
public:
    Simplex(const std::vector<std::vector<double>>& a, std::span<const double> b)
        : m_(a.size()), n_(a.empty() ? 0 : a.front().size()), cols_(n_ + 2 * m_), t_(m_, std::vector<double>(cols_ + 1)),
          basis_(m_)
    {
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                t_[i][j] = a[i][j];
            }
            t_[i][n_ + i] = -1.0;
            t_[i][n_ + m_ + i] = 1.0;
            t_[i][cols_] = b[i];
            basis_[i] = n_ + m_ + i;
        }
    }

    // Minimises cost over the columns allowed to enter; false if unbounded.
    bool run(const std::vector<double>& cost, std::size_t allowed)
    {
        for (std::size_t iter = 0; iter < 10000; ++iter) {
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < allowed; ++j) {
                double rc = cost[j];
                for (std::size_t i = 0; i < m_; ++i) {
                    rc -= cost[basis_[i]] * t_[i][j];
                }
                if (rc < -pivot_eps) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols_) {
                return true;
            }
            std::size_t leave = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                if (t_[i][enter] > pivot_eps) {
                    const double ratio = t_[i][cols_] / t_[i][enter];
                    if (ratio < best - pivot_eps || (std::abs(ratio - best) <= pivot_eps && basis_[i] < basis_[leave])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == m_) {
                return false;
            }
            pivot(leave, enter);
        }
        return false;
    }

    // Pivots zero-valued artificials out of the basis where possible.
    void expel_artificials()
    {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_ + m_) {
                continue;
            }
            for (std::size_t j = 0; j < n_ + m_; ++j) {
                if (std::abs(t_[i][j]) > pivot_eps) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    double value(std::size_t col) const
    {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] == col) {
                return t_[i][cols_];
            }
        }
        return 0.0;
    }

    std::size_t m_, n_, cols_;

private:
    void pivot(std::size_t r, std::size_t c)
    {
        const double p = t_[r][c];
        for (auto& v : t_[r]) {
            v /= p;
        }
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || t_[i][c] == 0.0) {
                continue;
            }
            const double f = t_[i][c];
            for (std::size_t j = 0; j <= cols_; ++j) {
                t_[i][j] -= f * t_[r][j];
            }
        }
        basis_[r] = c;
    }

    std::vector<std::vector<double>> t_;
    std::vector<std::size_t> basis_;
};

double sinr_min(std::span<const double> ranked_gain, std::span<const double> ranked_q, double noise)
{
    const auto k_count = ranked_gain.size();
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < k_count; ++k) {
        double interference = 0.0;
        for (std::size_t j = k + 1; j < k_count; ++j) {
            interference += ranked_q[j];
        }
        for (std::size_t l = k; l < k_count; ++l) {
            worst = std::min(worst, ranked_gain[l] * ranked_q[k] / (ranked_gain[l] * interference + noise));
        }
    }
    return worst;
}

std::vector<std::size_t> selection_order(std::span<const double> gain_power)
{
    std::vector<std::size_t> order(gain_power.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::size_t best = i;
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const auto a = order[j];
            const auto b = order[best];
            if (gain_power[a] < gain_power[b] || (gain_power[a] == gain_power[b] && a < b)) {
                best = j;
            }
        }
        std::swap(order[i], order[best]);
    }
    return order;
}

} // namespace

std::optional<std::vector<double>> lp_minimize(const std::vector<std::vector<double>>& a, std::span<const double> b,
                                               std::span<const double> c)
{
    Simplex s(a, b);
    const auto n = s.n_;
    const auto m = s.m_;
    std::vector<double> phase1(s.cols_, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        phase1[n + m + i] = 1.0;
    }
    s.run(phase1, s.cols_);
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        infeasibility += s.value(n + m + i);
    }
    const double scale = std::accumulate(b.begin(), b.end(), 1.0, [](double acc, double v) { return acc + std::abs(v); });
    if (infeasibility > 1e-9 * scale) {
        return std::nullopt;
    }
    s.expel_artificials();
    std::vector<double> phase2(s.cols_, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        phase2[j] = c[j];
    }
    if (!s.run(phase2, n + m)) {
        return std::nullopt;
    }
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) {
        x[j] = s.value(j);
    }
    return x;
}

std::optional<std::vector<double>> lp_min_power(const ChannelState& state, double t, double total_power_w,
                                                double noise_power_w)
{
    const auto k_count = state.size();
    // Variables are rank-ordered budget fractions; each row divided by gamma_l * P.
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t k = 0; k < k_count; ++k) {
        for (std::size_t l = k; l < k_count; ++l) {
            std::vector<double> row(k_count, 0.0);
            row[k] = 1.0;
            for (std::size_t j = k + 1; j < k_count; ++j) {
                row[j] = -t;
            }
            a.push_back(std::move(row));
            b.push_back(t * noise_power_w / (state.ranked_power(l) * total_power_w));
        }
    }
    const std::vector<double> c(k_count, 1.0);
    const auto x = lp_minimize(a, b, c);
    if (!x) {
        return std::nullopt;
    }
    const double total = std::accumulate(x->begin(), x->end(), 0.0);
    if (total > 1.0 + 1e-12) {
        return std::nullopt;
    }
    std::vector<double> q(k_count);
    for (std::size_t r = 0; r < k_count; ++r) {
        q[state.sic_order[r]] = (*x)[r] * total_power_w;
    }
    return q;
}

double lp_maxmin_sinr(const ChannelState& state, double total_power_w, double noise_power_w, double rel_tol)
{
    double hi = 0.0;
    for (std::size_t u = 0; u < state.size(); ++u) {
        hi = std::max(hi, state.gain_power(u) * total_power_w / noise_power_w);
    }
    double lo = 0.0;
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (lp_min_power(state, mid, total_power_w, noise_power_w)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double grid_maxmin_sinr(const ChannelState& state, double total_power_w, double noise_power_w, std::size_t steps)
{
    const auto k_count = state.size();
    std::vector<double> gain(k_count);
    for (std::size_t r = 0; r < k_count; ++r) {
        gain[r] = state.ranked_power(r);
    }
    std::vector<std::size_t> parts(k_count, 0);
    std::vector<double> q(k_count);
    double best = 0.0;
    // Enumerate compositions of `steps` into k_count parts.
    auto rec = [&](auto&& self, std::size_t idx, std::size_t left) -> void {
        if (idx + 1 == k_count) {
            parts[idx] = left;
            for (std::size_t r = 0; r < k_count; ++r) {
                q[r] = total_power_w * static_cast<double>(parts[r]) / static_cast<double>(steps);
            }
            best = std::max(best, sinr_min(gain, q, noise_power_w));
            return;
        }
        for (std::size_t v = 0; v <= left; ++v) {
            parts[idx] = v;
            self(self, idx + 1, left - v);
        }
    };
    rec(rec, 0, steps);
    return best;
}

std::vector<double> naive_rates(std::span<const double> gain_power, std::span<const double> q, double noise_power_w)
{
    const auto order = selection_order(gain_power);
    std::vector<double> rates(gain_power.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        double interference = 0.0;
        for (std::size_t j = k + 1; j < order.size(); ++j) {
            interference += q[order[j]];
        }
        double rate = std::numeric_limits<double>::infinity();
        for (std::size_t l = k; l < order.size(); ++l) {
            const double g = gain_power[order[l]];
            rate = std::min(rate, std::log2(1.0 + g * q[order[k]] / (g * interference + noise_power_w)));
        }
        rates[order[k]] = rate;
    }
    return rates;
}

std::vector<double> projection_by_threshold(std::span<const double> q_hat, double total_power_w)
{
    using ld = long double;
    ld lo = *std::min_element(q_hat.begin(), q_hat.end()) - static_cast<ld>(total_power_w);
    ld hi = *std::max_element(q_hat.begin(), q_hat.end());
    auto mass = [&](ld theta) {
        ld s = 0;
        for (double v : q_hat) {
            s += std::max<ld>(static_cast<ld>(v) - theta, 0);
        }
        return s;
    };
    for (int i = 0; i < 300; ++i) {
        const ld mid = (lo + hi) / 2;
        if (mass(mid) > total_power_w) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const ld theta = (lo + hi) / 2;
    std::vector<double> q(q_hat.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = static_cast<double>(std::max<ld>(static_cast<ld>(q_hat[i]) - theta, 0));
    }
    return q;
}

nn::FeatureMap naive_conv(const nn::FeatureMap& x, const nn::ConvLayer& layer)
{
    nn::FeatureMap padded(x.height + 1, x.width + 1, x.channels);
    for (std::size_t h = 0; h < x.height; ++h) {
        for (std::size_t w = 0; w < x.width; ++w) {
            for (std::size_t c = 0; c < x.channels; ++c) {
                padded.at(h, w, c) = x.at(h, w, c);
            }
        }
    }
    nn::FeatureMap out(x.height, x.width, layer.filters);
    for (std::size_t f = 0; f < layer.filters; ++f) {
        for (std::size_t h = 0; h < x.height; ++h) {
            for (std::size_t w = 0; w < x.width; ++w) {
                double acc = layer.bias[f];
                for (std::size_t i = 0; i < 2; ++i) {
                    for (std::size_t j = 0; j < 2; ++j) {
                        for (std::size_t c = 0; c < x.channels; ++c) {
                            acc += padded.at(h + i, w + j, c) * layer.w(f, i, j, c);
                        }
                    }
                }
                out.at(h, w, f) = acc;
            }
        }
    }
    return out;
}

double naive_mae(std::span<const double> pred, std::span<const double> target)
{
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        s += std::abs(pred[i] - target[i]);
    }
    return s / static_cast<double>(pred.size());
}

cplx freespace_extended(const Point3& user, const Point3& antenna, const SystemConfig& config)
{
    using ld = long double;
    const ld dx = static_cast<ld>(user.x) - antenna.x;
    const ld dy = static_cast<ld>(user.y) - antenna.y;
    const ld dz = static_cast<ld>(user.z) - antenna.z;
    const ld r = std::sqrt(dx * dx + dy * dy + dz * dz);
    const ld c = 299792458.0L;
    const ld pi = std::numbers::pi_v<ld>;
    const ld lambda = c / static_cast<ld>(config.carrier_freq_hz);
    const ld amp = (c / (4 * pi * static_cast<ld>(config.carrier_freq_hz))) / r;
    // Reduce the phase in cycles before scaling by 2 pi.
    const ld cycles = r / lambda;
    const ld frac = cycles - std::floor(cycles);
    const ld phase = -2 * pi * frac;
    return {static_cast<double>(amp * std::cos(phase)), static_cast<double>(amp * std::sin(phase))};
}

double curvature_from_terms(const CurvatureTerms& t)
{
    const double u = 1.0 / t.r1;
    const double du = -t.dr1 / (t.r1 * t.r1);
    const double d2u = 2.0 * t.dr1 * t.dr1 / (t.r1 * t.r1 * t.r1) - t.d2r1 / (t.r1 * t.r1);
    const double c = std::cos(t.delta);
    const double s = std::sin(t.delta);
    const double cross = d2u * c - 2.0 * du * s * t.ddelta - u * c * t.ddelta * t.ddelta - u * s * t.d2delta;
    return 0.5 * t.eta * (2.0 * du * du + 2.0 * u * d2u + (2.0 / t.r2) * cross);
}

double curvature_collinear(double r1, double r2, double delta, double ddelta, double eta)
{
    const double amp = 0.5 * eta;
    const double c = std::cos(delta);
    const double s = std::sin(delta);
    return 2.0 * amp *
           (3.0 / std::pow(r1, 4) + 2.0 * c / (std::pow(r1, 3) * r2) - 2.0 * ddelta * s / (r1 * r1 * r2) -
            ddelta * ddelta * c / (r1 * r2));
}

double curvature_exact(double a1, double a2, const Point3& user, const SystemConfig& config)
{
    const double lambda = config.wavelength();
    const double lambda_g = config.guided_wavelength();
    const double two_pi = 2.0 * std::numbers::pi;
    const double h = config.waveguide_height_m;
    const double off2 = user.y * user.y + (user.z - h) * (user.z - h);
    const double r1 = std::sqrt((a1 - user.x) * (a1 - user.x) + off2);
    const double r2 = std::sqrt((a2 - user.x) * (a2 - user.x) + off2);
    auto phase = [&](double a, double r) { return -two_pi * r / lambda + two_pi * std::abs(config.feed_x_m - a) / lambda_g; };
    CurvatureTerms t;
    t.r1 = r1;
    t.dr1 = (a1 - user.x) / r1;
    t.d2r1 = off2 / (r1 * r1 * r1);
    t.r2 = r2;
    t.delta = phase(a1, r1) - phase(a2, r2);
    const double side = a1 > config.feed_x_m ? 1.0 : (a1 < config.feed_x_m ? -1.0 : 0.0);
    t.ddelta = -two_pi * t.dr1 / lambda + two_pi * side / lambda_g;
    t.d2delta = -two_pi * t.d2r1 / lambda;
    t.eta = config.eta();
    return curvature_from_terms(t);
}

std::vector<double> central_gradient(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double h)
{
    std::vector<double> xp(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        const double up = f(xp);
        xp[i] = x[i] - h;
        const double down = f(xp);
        xp[i] = x[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

nn::CnnParams cnn_numeric_gradient(const nn::CnnModel& model, const nn::FeatureMap& x,
                                   std::span<const double> target, double h)
{
    nn::CnnModel probe = model;
    nn::CnnParams grads = model.params.zeros_like();
    auto pblocks = probe.params.blocks();
    auto gblocks = grads.blocks();
    for (std::size_t b = 0; b < pblocks.size(); ++b) {
        for (std::size_t i = 0; i < pblocks[b].size(); ++i) {
            const double keep = pblocks[b][i];
            pblocks[b][i] = keep + h;
            const double up = naive_mae(nn::forward(probe, x), target);
            pblocks[b][i] = keep - h;
            const double down = naive_mae(nn::forward(probe, x), target);
            pblocks[b][i] = keep;
            gblocks[b][i] = (up - down) / (2.0 * h);
        }
    }
    return grads;
}

} // namespace pinch::oracle
