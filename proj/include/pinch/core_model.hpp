#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pinch {

using cplx = std::complex<double>;

inline constexpr double speed_of_light = 299792458.0;

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// Physical constants, geometry and power budget for one scenario.
// Defaults follow the desk-scale preset: 28 GHz carrier, kappa 1.4, a 3 m
// high waveguide fed at the left edge of a 10 m x 10 m room, -90 dBm noise.
struct SystemConfig {
    double carrier_freq_hz = 28e9;
    double kappa = 1.4;
    double waveguide_height_m = 3.0;
    double feed_x_m = -5.0;
    double region_d1_m = 10.0;
    double region_d2_m = 10.0;
    double total_power_w = 1e-2;
    double noise_power_w = 1e-12;
    std::size_t antennas = 4;
    std::size_t users = 4;

    double wavelength() const { return speed_of_light / carrier_freq_hz; }
    double guided_wavelength() const { return wavelength() / kappa; }
    // Free-space path-loss constant (c / (4 pi f_c))^2.
    double eta() const;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

struct UserLayout {
    std::vector<Point3> positions;

    std::size_t size() const { return positions.size(); }
};

// Antenna x-coordinates along the waveguide, all at the same height.
struct AntennaPlacement {
    std::vector<double> xs;
    double height = 0.0;

    std::size_t size() const { return xs.size(); }
    Point3 antenna(std::size_t m) const { return {xs[m], 0.0, height}; }
};

// Per-user dimensionless effective channels plus the SIC decoding order.
// sic_order[r] is the user index holding rank r (rank 0 = weakest).
struct ChannelState {
    std::vector<cplx> gains;
    std::vector<std::size_t> sic_order;

    std::size_t size() const { return gains.size(); }
    double gain_power(std::size_t user) const { return std::norm(gains[user]); }
    // |g|^2 of the user at the given SIC rank.
    double ranked_power(std::size_t rank) const { return std::norm(gains[sic_order[rank]]); }
};

// Per-user transmit powers in watts, indexed by user (not by rank).
struct PowerAllocation {
    std::vector<double> q;
    double budget_w = 0.0;

    double total() const;
    // q >= 0 and sum(q) <= budget + 1e-9 * budget.
    bool feasible() const;
};

cplx freespace_coefficient(const Point3& user, const Point3& antenna, const SystemConfig& config);

// Guided phase factor exp(+j 2 pi |feed_x - antenna_x| / lambda_g).
cplx waveguide_phase(double feed_x, double antenna_x, const SystemConfig& config);

cplx effective_channel(const Point3& user, const AntennaPlacement& placement, const SystemConfig& config);

ChannelState channel_state(const UserLayout& layout, const AntennaPlacement& placement,
                           const SystemConfig& config);

// Builds a state from precomputed gains; ties in |g|^2 keep user-index order.
ChannelState make_channel_state(std::vector<cplx> gains);

// SINR at the decoder of SIC rank `l` for the message of SIC rank `k`.
double decode_sinr(const ChannelState& state, const PowerAllocation& q, std::size_t k, std::size_t l,
                   double noise_power_w);

// Rate of the user at SIC rank k: min over decoders l >= k of log2(1 + SINR).
double user_rate(const ChannelState& state, const PowerAllocation& q, std::size_t k, double noise_power_w);

// Rates indexed by user.
std::vector<double> user_rates(const ChannelState& state, const PowerAllocation& q, double noise_power_w);

double sum_rate(const ChannelState& state, const PowerAllocation& q, double noise_power_w);
double sum_rate(const UserLayout& layout, const AntennaPlacement& placement, const PowerAllocation& q,
                const SystemConfig& config);

// Central finite-difference estimate of d^2 |g|^2 / d a1^2 for a two-antenna
// placement {a1, a2}, step 1e-4 * lambda.
double channel_power_curvature(double a1, double a2, const Point3& user, const SystemConfig& config);

} // namespace pinch
