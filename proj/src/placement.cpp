#include "pinch/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pinch/errors.hpp"
#include "pinch/power_alloc.hpp"

namespace pinch {

namespace {

double clip(double x, double lo, double hi)
{
    return std::max(lo, std::min(x, hi));
}

} // namespace

PlacementParams PlacementParams::defaults(const SystemConfig& config)
{
    PlacementParams p;
    p.guard_m = 0.5 * config.wavelength();
    p.a_min = -0.5 * config.region_d1_m;
    p.a_max = 0.5 * config.region_d1_m;
    return p;
}

void PlacementParams::validate(std::size_t antennas) const
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("placement.alpha: must lie in [0, 1]");
    }
    if (!(guard_m >= 0.0) || !std::isfinite(guard_m)) {
        throw ConfigError("placement.guard_m: must be >= 0");
    }
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ConfigError("placement.step_m: must be > 0");
    }
    if (!(fd_delta_m > 0.0) || !std::isfinite(fd_delta_m)) {
        throw ConfigError("placement.fd_delta_m: must be > 0");
    }
    if (!(tol > 0.0)) {
        throw ConfigError("placement.tol_rel: must be > 0");
    }
    if (!std::isfinite(a_min) || !std::isfinite(a_max) || a_max < a_min) {
        throw ConfigError("placement.a_min_m/a_max_m: need finite a_min <= a_max");
    }
    if (antennas == 0) {
        throw ConfigError("system.antennas: must be >= 1");
    }
    if (a_max - a_min < static_cast<double>(antennas - 1) * guard_m) {
        throw Infeasible("placement interval shorter than (M-1) * guard");
    }
}

PlacementObjective maxmin_sum_rate_objective(const UserLayout& layout, const SystemConfig& config)
{
    return [layout, config](std::span<const double> xs) {
        AntennaPlacement placement{{xs.begin(), xs.end()}, config.waveguide_height_m};
        const auto state = channel_state(layout, placement, config);
        const auto mm = maxmin_power(state, config.total_power_w, config.noise_power_w);
        return sum_rate(state, mm.q_opt, config.noise_power_w);
    };
}

std::vector<double> project_feasible(std::span<const double> xs, const PlacementParams& params)
{
    const std::size_t n = xs.size();
    params.validate(std::max<std::size_t>(n, 1));
    std::vector<double> out(xs.begin(), xs.end());
    std::sort(out.begin(), out.end());
    if (n == 0) {
        return out;
    }
    const double g = params.guard_m;
    constexpr double inf = std::numeric_limits<double>::infinity();
    // Same result as clamping each antenna into [prev + guard, a_max - rest * guard]
    // in one pass, but the spacing also survives rounding near a_max.
    // Forward: push each antenna at least one guard right of its neighbour.
    out[0] = clip(out[0], params.a_min, params.a_max);
    for (std::size_t m = 1; m < n; ++m) {
        double lo = out[m - 1] + g;
        if (lo - out[m - 1] < g) {
            lo = std::nextafter(lo, inf);
        }
        out[m] = std::max(out[m], lo);
    }
    // Backward: pull the tail under a_max, keeping the spacing exact in floating point.
    out[n - 1] = std::min(out[n - 1], params.a_max);
    for (std::size_t m = n - 1; m-- > 0;) {
        double hi = out[m + 1] - g;
        if (out[m + 1] - hi < g) {
            hi = std::nextafter(hi, -inf);
        }
        out[m] = std::min(out[m], hi);
    }
    return out;
}

bool is_feasible(std::span<const double> xs, const PlacementParams& params)
{
    for (std::size_t m = 0; m < xs.size(); ++m) {
        if (xs[m] < params.a_min || xs[m] > params.a_max) {
            return false;
        }
        if (m > 0 && !(xs[m] - xs[m - 1] >= params.guard_m)) {
            return false;
        }
    }
    return true;
}

AntennaPlacement init_placement(const UserLayout& layout, std::size_t antennas, const PlacementParams& params,
                                double height)
{
    if (layout.size() == 0) {
        throw ConfigError("users: layout is empty");
    }
    params.validate(antennas);
    const auto [lo_it, hi_it] = std::minmax_element(layout.positions.begin(), layout.positions.end(),
                                                    [](const Point3& a, const Point3& b) { return a.x < b.x; });
    const double x_min = lo_it->x;
    const double x_max = hi_it->x;

    std::vector<double> xs(antennas);
    if (antennas == 1) {
        xs[0] = 0.5 * (x_min + x_max);
    } else if (x_max == x_min) {
        // No spread to cover: fan out around the common x at guard spacing.
        for (std::size_t m = 0; m < antennas; ++m) {
            xs[m] = x_min + (static_cast<double>(m) - 0.5 * static_cast<double>(antennas - 1)) * params.guard_m;
        }
    } else {
        for (std::size_t m = 0; m < antennas; ++m) {
            const double a0 = x_min + static_cast<double>(m) / static_cast<double>(antennas - 1) * (x_max - x_min);
            std::size_t nearest = 0;
            for (std::size_t k = 1; k < layout.size(); ++k) {
                if (std::abs(layout.positions[k].x - a0) < std::abs(layout.positions[nearest].x - a0)) {
                    nearest = k;
                }
            }
            xs[m] = (1.0 - params.alpha) * a0 + params.alpha * layout.positions[nearest].x;
        }
    }
    return AntennaPlacement{project_feasible(xs, params), height};
}

std::vector<double> fd_gradient(const PlacementObjective& objective, std::span<const double> xs, double delta,
                                const PlacementParams& params)
{
    const double base = objective(xs);
    std::vector<double> grad(xs.size(), 0.0);
    std::vector<double> probe(xs.begin(), xs.end());
    for (std::size_t m = 0; m < xs.size(); ++m) {
        probe.assign(xs.begin(), xs.end());
        probe[m] += delta;
        const auto projected = project_feasible(probe, params);
        grad[m] = (objective(projected) - base) / delta;
    }
    return grad;
}

PlacementSolution refine_from(const PlacementObjective& objective, AntennaPlacement start,
                              const PlacementParams& params)
{
    params.validate(start.size());
    PlacementSolution sol;
    sol.placement = std::move(start);
    sol.placement.xs = project_feasible(sol.placement.xs, params);
    double sr = objective(sol.placement.xs);
    sol.sr_init = sr;
    sol.trace.push_back(sr);

    std::vector<double> candidate(sol.placement.size());
    while (sol.iterations < params.max_iters) {
        ++sol.iterations;
        const auto grad = fd_gradient(objective, sol.placement.xs, params.fd_delta_m, params);
        double grad_max = 0.0;
        for (double g : grad) {
            grad_max = std::max(grad_max, std::abs(g));
        }
        if (!(grad_max > 0.0) || !std::isfinite(grad_max)) {
            break;
        }
        // Backtracking: accept only strict improvements, halving the step.
        bool accepted = false;
        double step = params.step;
        double sr_next = sr;
        for (std::size_t h = 0; h <= params.max_halvings; ++h, step *= 0.5) {
            for (std::size_t m = 0; m < candidate.size(); ++m) {
                candidate[m] = sol.placement.xs[m] + step * grad[m] / grad_max;
            }
            candidate = project_feasible(candidate, params);
            sr_next = objective(candidate);
            if (sr_next > sr) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            break;
        }
        const double gain = sr_next - sr;
        const double previous = sr;
        sol.placement.xs = candidate;
        sr = sr_next;
        sol.trace.push_back(sr);
        if (gain < params.tol * std::abs(previous)) {
            break;
        }
    }
    sol.sr_final = sr;
    return sol;
}

PlacementSolution refine_placement(const UserLayout& layout, const SystemConfig& config,
                                   const PlacementParams& params, const PlacementObjective& objective)
{
    auto start = init_placement(layout, config.antennas, params, config.waveguide_height_m);
    return refine_from(objective, std::move(start), params);
}

PlacementSolution refine_placement(const UserLayout& layout, const SystemConfig& config,
                                   const PlacementParams& params)
{
    return refine_placement(layout, config, params, maxmin_sum_rate_objective(layout, config));
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points)
{
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = 0.5 * (lo + hi);
        return grid;
    }
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(points - 1);
    }
    return grid;
}

AntennaPlacement brute_force_placement(const PlacementObjective& objective, std::size_t antennas,
                                       std::size_t grid_points, const PlacementParams& params, double height,
                                       double budget)
{
    params.validate(antennas);
    if (grid_points == 0) {
        throw ConfigError("experiment.grid_points: must be >= 1");
    }
    if (std::pow(static_cast<double>(grid_points), static_cast<double>(antennas)) > budget) {
        throw BudgetExceeded("G^M = " + std::to_string(grid_points) + "^" + std::to_string(antennas) +
                             " exceeds the brute-force budget");
    }
    const auto grid = uniform_grid(params.a_min, params.a_max, grid_points);
    if (antennas > grid_points) {
        throw Infeasible("more antennas than grid points");
    }

    std::vector<std::size_t> idx(antennas);
    std::vector<double> xs(antennas);
    std::vector<double> best;
    double best_sr = -std::numeric_limits<double>::infinity();

    // Lexicographic enumeration of strictly increasing index tuples.
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
        bool spaced = true;
        for (std::size_t m = 0; m < antennas; ++m) {
            xs[m] = grid[idx[m]];
            if (m > 0 && !(xs[m] - xs[m - 1] >= params.guard_m)) {
                spaced = false;
            }
        }
        if (spaced) {
            const double sr = objective(xs);
            if (sr > best_sr) {
                best_sr = sr;
                best = xs;
            }
        }
        std::size_t m = antennas;
        while (m > 0 && idx[m - 1] == grid_points - antennas + (m - 1)) {
            --m;
        }
        if (m == 0) {
            break;
        }
        ++idx[m - 1];
        for (std::size_t j = m; j < antennas; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
    if (best.empty()) {
        throw Infeasible("no grid tuple satisfies the guard spacing");
    }
    return AntennaPlacement{std::move(best), height};
}

double relative_gap(double sr_bf, double sr_it)
{
    if (!(sr_bf > 0.0)) {
        throw DegenerateObjective("brute-force sum rate must be positive");
    }
    return 1.0 - sr_it / sr_bf;
}

GapSummary mrg_xrg(std::span<const double> gaps)
{
    if (gaps.empty()) {
        throw EmptyData("no gaps to summarise");
    }
    GapSummary s;
    s.mrg = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
    s.xrg = *std::max_element(gaps.begin(), gaps.end());
    return s;
}

} // namespace pinch
