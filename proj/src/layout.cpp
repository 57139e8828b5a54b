#include "pinch/layout.hpp"

namespace pinch {

UserLayout sample_layout(const SystemConfig& config, std::mt19937_64& rng)
{
    const double hx = 0.5 * config.region_d1_m;
    const double hy = 0.5 * config.region_d2_m;
    // uniform_real_distribution requires a < b; a degenerate side pins users to 0.
    std::uniform_real_distribution<double> ux(-hx, hx > 0.0 ? hx : 1.0);
    std::uniform_real_distribution<double> uy(-hy, hy > 0.0 ? hy : 1.0);
    UserLayout layout;
    layout.positions.reserve(config.users);
    for (std::size_t k = 0; k < config.users; ++k) {
        const double x = ux(rng);
        const double y = uy(rng);
        layout.positions.push_back({hx > 0.0 ? x : 0.0, hy > 0.0 ? y : 0.0, 0.0});
    }
    return layout;
}

} // namespace pinch
