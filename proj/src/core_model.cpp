#include "pinch/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "pinch/errors.hpp"

namespace pinch {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double distance(const Point3& a, const Point3& b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void require(bool ok, const char* field, const char* rule)
{
    if (!ok) {
        throw ConfigError(std::string(field) + ": " + rule);
    }
}

} // namespace

double SystemConfig::eta() const
{
    const double a = speed_of_light / (4.0 * std::numbers::pi * carrier_freq_hz);
    return a * a;
}

void SystemConfig::validate() const
{
    require(std::isfinite(carrier_freq_hz) && carrier_freq_hz > 0.0, "system.fc_ghz", "must be > 0");
    require(std::isfinite(kappa) && kappa >= 1.0, "system.kappa", "must be >= 1");
    require(std::isfinite(waveguide_height_m) && waveguide_height_m > 0.0, "system.height_m", "must be > 0");
    require(std::isfinite(feed_x_m), "system.feed_x_m", "must be finite");
    require(std::isfinite(region_d1_m) && region_d1_m >= 0.0, "system.d1_m", "must be >= 0");
    require(std::isfinite(region_d2_m) && region_d2_m >= 0.0, "system.d2_m", "must be >= 0");
    require(std::isfinite(total_power_w) && total_power_w > 0.0, "system.power_dbm", "must be > 0");
    require(std::isfinite(noise_power_w) && noise_power_w > 0.0, "system.noise_dbm", "must be > 0");
    require(antennas >= 1, "system.antennas", "must be >= 1");
    require(users >= 1, "system.users", "must be >= 1");
    const double lam = wavelength();
    const double e = eta();
    require(std::isfinite(lam) && lam > 0.0 && std::isfinite(guided_wavelength()) && std::isfinite(e) && e > 0.0,
            "system.fc_ghz", "derived wavelength/eta not finite");
}

double PowerAllocation::total() const
{
    return std::accumulate(q.begin(), q.end(), 0.0);
}

bool PowerAllocation::feasible() const
{
    if (!std::all_of(q.begin(), q.end(), [](double v) { return v >= 0.0; })) {
        return false;
    }
    return total() <= budget_w + 1e-9 * budget_w;
}

cplx freespace_coefficient(const Point3& user, const Point3& antenna, const SystemConfig& config)
{
    const double r = distance(user, antenna);
    if (r == 0.0) {
        throw DegenerateGeometry("user coincides with an antenna");
    }
    return std::polar(std::sqrt(config.eta()) / r, -two_pi * r / config.wavelength());
}

cplx waveguide_phase(double feed_x, double antenna_x, const SystemConfig& config)
{
    return std::polar(1.0, two_pi * std::abs(feed_x - antenna_x) / config.guided_wavelength());
}

cplx effective_channel(const Point3& user, const AntennaPlacement& placement, const SystemConfig& config)
{
    cplx sum{0.0, 0.0};
    for (std::size_t m = 0; m < placement.size(); ++m) {
        sum += freespace_coefficient(user, placement.antenna(m), config) *
               waveguide_phase(config.feed_x_m, placement.xs[m], config);
    }
    return sum / std::sqrt(static_cast<double>(placement.size()));
}

ChannelState make_channel_state(std::vector<cplx> gains)
{
    ChannelState state;
    state.gains = std::move(gains);
    state.sic_order.resize(state.gains.size());
    std::iota(state.sic_order.begin(), state.sic_order.end(), std::size_t{0});
    std::stable_sort(state.sic_order.begin(), state.sic_order.end(), [&](std::size_t a, std::size_t b) {
        return std::norm(state.gains[a]) < std::norm(state.gains[b]);
    });
    return state;
}

ChannelState channel_state(const UserLayout& layout, const AntennaPlacement& placement,
                           const SystemConfig& config)
{
    std::vector<cplx> gains;
    gains.reserve(layout.size());
    for (const auto& u : layout.positions) {
        gains.push_back(effective_channel(u, placement, config));
    }
    return make_channel_state(std::move(gains));
}

double decode_sinr(const ChannelState& state, const PowerAllocation& q, std::size_t k, std::size_t l,
                   double noise_power_w)
{
    if (l < k) {
        throw RankOrder("decoder rank " + std::to_string(l) + " below decoded rank " + std::to_string(k));
    }
    const std::size_t n = state.size();
    double interference = 0.0;
    for (std::size_t j = k + 1; j < n; ++j) {
        interference += q.q[state.sic_order[j]];
    }
    const double g = state.ranked_power(l);
    return g * q.q[state.sic_order[k]] / (g * interference + noise_power_w);
}

double user_rate(const ChannelState& state, const PowerAllocation& q, std::size_t k, double noise_power_w)
{
    double rate = std::log2(1.0 + decode_sinr(state, q, k, k, noise_power_w));
    for (std::size_t l = k + 1; l < state.size(); ++l) {
        rate = std::min(rate, std::log2(1.0 + decode_sinr(state, q, k, l, noise_power_w)));
    }
    return rate;
}

std::vector<double> user_rates(const ChannelState& state, const PowerAllocation& q, double noise_power_w)
{
    std::vector<double> rates(state.size(), 0.0);
    for (std::size_t k = 0; k < state.size(); ++k) {
        rates[state.sic_order[k]] = user_rate(state, q, k, noise_power_w);
    }
    return rates;
}

double sum_rate(const ChannelState& state, const PowerAllocation& q, double noise_power_w)
{
    double total = 0.0;
    for (std::size_t k = 0; k < state.size(); ++k) {
        total += user_rate(state, q, k, noise_power_w);
    }
    return total;
}

double sum_rate(const UserLayout& layout, const AntennaPlacement& placement, const PowerAllocation& q,
                const SystemConfig& config)
{
    return sum_rate(channel_state(layout, placement, config), q, config.noise_power_w);
}

double channel_power_curvature(double a1, double a2, const Point3& user, const SystemConfig& config)
{
    const double h = 1e-4 * config.wavelength();
    if (!(h > 0.0) || a1 + h == a1 || a1 - h == a1) {
        throw NumericalStep("curvature step underflows at a1 = " + std::to_string(a1));
    }
    // |g|^2 in extended precision: the second difference cancels ~7 digits.
    using ld = long double;
    const ld lambda = speed_of_light / static_cast<ld>(config.carrier_freq_hz);
    const ld lambda_g = lambda / static_cast<ld>(config.kappa);
    const ld two_pi_l = 2 * std::numbers::pi_v<ld>;
    auto term = [&](ld x) {
        const ld dx = static_cast<ld>(user.x) - x;
        const ld dy = user.y;
        const ld dz = static_cast<ld>(user.z) - static_cast<ld>(config.waveguide_height_m);
        const ld r = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (r == 0) {
            throw DegenerateGeometry("user coincides with an antenna");
        }
        const ld phase = two_pi_l * (std::abs(static_cast<ld>(config.feed_x_m) - x) / lambda_g - r / lambda);
        return std::complex<ld>(std::cos(phase) / r, std::sin(phase) / r);
    };
    const auto second = term(a2);
    auto power = [&](ld x) { return std::norm(term(x) + second) * static_cast<ld>(config.eta()) / 2; };
    const ld hl = h;
    const ld a = a1;
    return static_cast<double>((power(a + hl) - 2 * power(a) + power(a - hl)) / (hl * hl));
}

} // namespace pinch
