#include "pinch/power_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "pinch/errors.hpp"

namespace pinch {

namespace {

void require_nonzero_gains(const ChannelState& state)
{
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (!(state.gain_power(i) > 0.0)) {
            throw DegenerateChannel("user " + std::to_string(i) + " has zero channel gain");
        }
    }
}

struct Recursion {
    std::vector<double> q;  // by user
    double total = 0.0;
    double dtotal_dt = 0.0;
};

// Backward recursion in SIC order. Under ascending |g|^2 the decoder of
// user k that binds is l = k, so q_k = t (sum_{j>k} q_j + sigma^2 / |g_k|^2).
Recursion backward_recursion(const ChannelState& state, double t, double noise_power_w)
{
    Recursion out;
    out.q.assign(state.size(), 0.0);
    double suffix = 0.0;
    double dsuffix = 0.0;
    for (std::size_t r = state.size(); r-- > 0;) {
        const double base = suffix + noise_power_w / state.ranked_power(r);
        const double qk = t * base;
        const double dqk = base + t * dsuffix;
        out.q[state.sic_order[r]] = qk;
        suffix += qk;
        dsuffix += dqk;
    }
    out.total = suffix;
    out.dtotal_dt = dsuffix;
    return out;
}

} // namespace

std::optional<PowerAllocation> feasibility_min_power(const ChannelState& state, double t, double total_power_w,
                                                     double noise_power_w)
{
    require_nonzero_gains(state);
    auto rec = backward_recursion(state, t, noise_power_w);
    PowerAllocation alloc{std::move(rec.q), total_power_w};
    if (!alloc.feasible()) {
        return std::nullopt;
    }
    return alloc;
}

std::vector<double> decode_chain_sinrs(const ChannelState& state, const PowerAllocation& q, double noise_power_w)
{
    std::vector<double> out(state.size(), 0.0);
    for (std::size_t k = 0; k < state.size(); ++k) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t l = k; l < state.size(); ++l) {
            worst = std::min(worst, decode_sinr(state, q, k, l, noise_power_w));
        }
        out[state.sic_order[k]] = worst;
    }
    return out;
}

MaxMinResult maxmin_power(const ChannelState& state, double total_power_w, double noise_power_w, double tol)
{
    if (!(tol > 0.0)) {
        throw ConfigError("bisection tolerance must be > 0");
    }
    require_nonzero_gains(state);
    MaxMinResult result;
    if (state.size() == 0) {
        result.q_opt.budget_w = total_power_w;
        return result;
    }
    if (state.size() == 1) {
        // A lone user simply takes the whole budget.
        result.q_opt = PowerAllocation{{total_power_w}, total_power_w};
        result.achieved_sinrs = decode_chain_sinrs(state, result.q_opt, noise_power_w);
        result.t_opt = result.achieved_sinrs.front();
        return result;
    }

    // Interference-free full-power SINR of the weakest user bounds every
    // achievable common SINR.
    double t_lo = 0.0;
    double t_hi = state.ranked_power(0) * total_power_w / noise_power_w;
    while (t_hi - t_lo > tol * t_hi) {
        const double mid = 0.5 * (t_lo + t_hi);
        if (backward_recursion(state, mid, noise_power_w).total <= total_power_w) {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
        ++result.iterations;
    }

    // The optimum exhausts the budget: finish the bracket with safeguarded
    // Newton on sum(q(t)) = P so the returned q binds to rounding precision.
    double t = t_lo;
    for (int i = 0; i < 100; ++i) {
        const auto rec = backward_recursion(state, t, noise_power_w);
        const double excess = rec.total - total_power_w;
        if (std::abs(excess) <= 1e-14 * total_power_w) {
            break;
        }
        if (excess > 0.0) {
            t_hi = std::min(t_hi, t);
        } else {
            t_lo = std::max(t_lo, t);
        }
        double next = t - excess / rec.dtotal_dt;
        if (!(next > t_lo && next < t_hi)) {
            next = 0.5 * (t_lo + t_hi);
        }
        if (next == t) {
            break;
        }
        t = next;
    }
    auto rec = backward_recursion(state, t, noise_power_w);
    if (rec.total > total_power_w) {
        // Newton approaches from above on this convex curve; close the last
        // few ulps by bisection toward the feasible side.
        double lo = t_lo;
        double hi = t;
        for (int i = 0; i < 200 && lo < hi && std::nextafter(lo, hi) < hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (backward_recursion(state, mid, noise_power_w).total > total_power_w) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        rec = backward_recursion(state, lo, noise_power_w);
    }
    result.q_opt = PowerAllocation{std::move(rec.q), total_power_w};
    result.achieved_sinrs = decode_chain_sinrs(state, result.q_opt, noise_power_w);
    result.t_opt = *std::min_element(result.achieved_sinrs.begin(), result.achieved_sinrs.end());
    return result;
}

ProjectionResult simplex_project(std::span<const double> q_hat, double total_power_w)
{
    ProjectionResult out;
    out.q_proj.budget_w = total_power_w;
    const std::size_t n = q_hat.size();
    const bool nonneg = std::all_of(q_hat.begin(), q_hat.end(), [](double v) { return v >= 0.0; });
    const double sum = std::accumulate(q_hat.begin(), q_hat.end(), 0.0);
    if (nonneg && sum <= total_power_w + 1e-9 * total_power_w) {
        out.q_proj.q.assign(q_hat.begin(), q_hat.end());
        out.rho = n;
        return out;
    }

    std::vector<double> u(q_hat.begin(), q_hat.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double prefix = 0.0;
    double active_sum = 0.0;
    std::size_t rho = 0;
    for (std::size_t j = 0; j < n; ++j) {
        prefix += u[j];
        if (u[j] + (total_power_w - prefix) / static_cast<double>(j + 1) > 0.0) {
            rho = j + 1;
            active_sum = prefix;
        }
    }
    out.rho = rho;
    out.theta = (active_sum - total_power_w) / static_cast<double>(rho);
    out.q_proj.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.q_proj.q[i] = std::max(q_hat[i] - out.theta, 0.0);
    }
    return out;
}

PowerAllocation fixed_power_coeffs(const ChannelState& state, double total_power_w, std::span<const double> weights)
{
    const std::size_t n = state.size();
    std::vector<double> shares(n);
    if (weights.empty()) {
        for (std::size_t r = 0; r < n; ++r) {
            shares[r] = std::ldexp(1.0, static_cast<int>(n - 1 - r));
        }
    } else {
        if (weights.size() != n) {
            throw ShapeError("fixed power weights: expected " + std::to_string(n) + " entries");
        }
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) {
                throw ConfigError("fixed power weights must be finite and >= 0");
            }
        }
        shares.assign(weights.begin(), weights.end());
    }
    const double norm = std::accumulate(shares.begin(), shares.end(), 0.0);
    if (!(norm > 0.0)) {
        throw ConfigError("fixed power weights sum to zero");
    }
    PowerAllocation alloc{std::vector<double>(n, 0.0), total_power_w};
    for (std::size_t r = 0; r < n; ++r) {
        alloc.q[state.sic_order[r]] = total_power_w * shares[r] / norm;
    }
    return alloc;
}

} // namespace pinch
