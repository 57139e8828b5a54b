#pragma once

#include <random>

#include "pinch/core_model.hpp"

namespace pinch {

// K users i.i.d. uniform on [-D1/2, D1/2] x [-D2/2, D2/2] at z = 0.
UserLayout sample_layout(const SystemConfig& config, std::mt19937_64& rng);

} // namespace pinch
