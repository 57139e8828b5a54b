#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pinch/core_model.hpp"

namespace pinch {

struct PlacementParams {
    double alpha = 0.5;
    double guard_m = 0.0;
    // Largest antenna move of one ascent step (m); the gradient is scaled so
    // its largest component maps to this distance.
    double step = 0.1;
    double fd_delta_m = 1e-3;
    // Stop once one accepted step improves the sum rate by less than tol * SR.
    double tol = 1e-4;
    std::size_t max_iters = 200;
    std::size_t max_halvings = 20;
    double a_min = -5.0;
    double a_max = 5.0;

    // Guard lambda/2 and bounds [-D1/2, D1/2] derived from the scenario.
    static PlacementParams defaults(const SystemConfig& config);

    // Throws ConfigError / Infeasible for `antennas` elements.
    void validate(std::size_t antennas) const;
};

struct PlacementSolution {
    AntennaPlacement placement;
    double sr_init = 0.0;
    double sr_final = 0.0;
    std::size_t iterations = 0;
    std::vector<double> trace;
};

// Sum rate as a function of the antenna x-coordinates.
using PlacementObjective = std::function<double(std::span<const double>)>;

// SR(a) with the max-min power allocation re-solved for every placement.
PlacementObjective maxmin_sum_rate_objective(const UserLayout& layout, const SystemConfig& config);

// Sort, then forward-clamp onto {a_min <= a_1, a_{m+1} - a_m >= guard, a_M <= a_max}.
std::vector<double> project_feasible(std::span<const double> xs, const PlacementParams& params);

bool is_feasible(std::span<const double> xs, const PlacementParams& params);

// Stage I: uniform spread over the user x-span, nudged toward the nearest user.
AntennaPlacement init_placement(const UserLayout& layout, std::size_t antennas, const PlacementParams& params,
                                double height);

// Forward-difference gradient with guard-projected perturbations.
std::vector<double> fd_gradient(const PlacementObjective& objective, std::span<const double> xs, double delta,
                                const PlacementParams& params);

// Stage II from an explicit starting placement.
PlacementSolution refine_from(const PlacementObjective& objective, AntennaPlacement start,
                              const PlacementParams& params);

// Stage I followed by Stage II.
PlacementSolution refine_placement(const UserLayout& layout, const SystemConfig& config,
                                   const PlacementParams& params, const PlacementObjective& objective);
PlacementSolution refine_placement(const UserLayout& layout, const SystemConfig& config,
                                   const PlacementParams& params);

inline constexpr double default_brute_force_budget = 1e7;

// Exhaustive search over increasing M-tuples of a uniform G-point grid on
// [a_min, a_max] that respect the guard; ties keep the lexicographically
// smallest index tuple.
AntennaPlacement brute_force_placement(const PlacementObjective& objective, std::size_t antennas,
                                       std::size_t grid_points, const PlacementParams& params, double height,
                                       double budget = default_brute_force_budget);

std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

double relative_gap(double sr_bf, double sr_it);

struct GapSummary {
    double mrg = 0.0;
    double xrg = 0.0;
};

GapSummary mrg_xrg(std::span<const double> gaps);

} // namespace pinch
