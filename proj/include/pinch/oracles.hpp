#pragma once

// Slow, independent reference implementations. Test and validation code
// only; nothing in the main library depends on them.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pinch/core_model.hpp"
#include "pinch/neural/cnn.hpp"
#include "pinch/placement.hpp"

namespace pinch::oracle {

// Dense two-phase simplex (Bland's rule) for
//   minimise c.x  s.t.  A x >= b,  x >= 0,  with b >= 0.
// Returns nullopt when infeasible.
std::optional<std::vector<double>> lp_minimize(const std::vector<std::vector<double>>& a, std::span<const double> b,
                                               std::span<const double> c);

// Least total power meeting SINR_{l,k} >= t for every decoder l >= k,
// indexed by user, built as the full LP (not the recursion). nullopt when
// the least power exceeds P.
std::optional<std::vector<double>> lp_min_power(const ChannelState& state, double t, double total_power_w,
                                                double noise_power_w);

// Bisection on t using the LP feasibility test.
double lp_maxmin_sinr(const ChannelState& state, double total_power_w, double noise_power_w, double rel_tol);

// Best min-SINR over a uniform lattice on {q >= 0, sum q = P} with `steps` divisions.
double grid_maxmin_sinr(const ChannelState& state, double total_power_w, double noise_power_w, std::size_t steps);

// SINR/rate from first principles: |g|^2 by user, powers by user; ordering by selection sort.
std::vector<double> naive_rates(std::span<const double> gain_power, std::span<const double> q, double noise_power_w);

// Projection onto {q >= 0, sum q = P} by bisection on the threshold, in long double.
std::vector<double> projection_by_threshold(std::span<const double> q_hat, double total_power_w);

// Explicitly zero-padded 2x2 convolution (pad one row/column at bottom/right).
nn::FeatureMap naive_conv(const nn::FeatureMap& x, const nn::ConvLayer& layer);

double naive_mae(std::span<const double> pred, std::span<const double> target);

// Free-space coefficient in extended precision.
cplx freespace_extended(const Point3& user, const Point3& antenna, const SystemConfig& config);

// Exact second derivative of |g|^2 in a1 for the two-antenna placement {a1, a2}.
double curvature_exact(double a1, double a2, const Point3& user, const SystemConfig& config);

// Chain-rule curvature from the pieces: u = 1/r1 and its derivatives, the
// phase difference and its derivatives, r2 and the path-loss constant.
struct CurvatureTerms {
    double r1 = 0.0, dr1 = 0.0, d2r1 = 0.0;
    double r2 = 0.0;
    double delta = 0.0, ddelta = 0.0, d2delta = 0.0;
    double eta = 0.0;
};
double curvature_from_terms(const CurvatureTerms& t);

// The closed form for a collinear geometry (dr1/da1 = -1, constant phase slope).
double curvature_collinear(double r1, double r2, double delta, double ddelta, double eta);

// Central-difference gradient of an objective.
std::vector<double> central_gradient(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double h);

// Central-difference gradient of the MAE loss with respect to every CNN parameter.
nn::CnnParams cnn_numeric_gradient(const nn::CnnModel& model, const nn::FeatureMap& x,
                                   std::span<const double> target, double h);

} // namespace pinch::oracle
