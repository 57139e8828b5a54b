#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pinch/core_model.hpp"

namespace pinch {

struct MaxMinResult {
    PowerAllocation q_opt;
    double t_opt = 0.0;
    std::size_t iterations = 0;
    // min over decoders of SINR for each user, indexed by user.
    std::vector<double> achieved_sinrs;
};

struct ProjectionResult {
    PowerAllocation q_proj;
    double theta = 0.0;
    std::size_t rho = 0;
};

inline constexpr double default_bisection_tol = 1e-6;

// Minimum-total-power allocation meeting SINR_{l,k} >= t for every l >= k,
// or nullopt when it needs more than P. Throws DegenerateChannel on a zero gain.
std::optional<PowerAllocation> feasibility_min_power(const ChannelState& state, double t, double total_power_w,
                                                     double noise_power_w);

// Max-min SINR power allocation by bisection over the common SINR target.
MaxMinResult maxmin_power(const ChannelState& state, double total_power_w, double noise_power_w,
                          double tol = default_bisection_tol);

// min over l >= k of SINR_{l,k} for every user, indexed by user.
std::vector<double> decode_chain_sinrs(const ChannelState& state, const PowerAllocation& q, double noise_power_w);

// Euclidean projection onto {q >= 0, sum q = P}; q_hat already inside
// {q >= 0, sum q <= P} passes through unchanged with theta = 0, rho = K.
ProjectionResult simplex_project(std::span<const double> q_hat, double total_power_w);

// Fixed NOMA shares P * 2^(K-k) / (2^K - 1) by SIC rank k = 1..K, weakest
// user first. A non-empty `weights` overrides the geometric shares (by rank,
// renormalised to sum to P).
PowerAllocation fixed_power_coeffs(const ChannelState& state, double total_power_w,
                                   std::span<const double> weights = {});

} // namespace pinch
