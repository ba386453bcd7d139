#pragma once

#include <cstdint>
#include <vector>

#include "dcs/grid.hpp"

namespace dcs {

/// All-A grid with exactly n_points distinct cells set to B. One SplitMix64
/// draw per axis per point, reduced modulo the extent; colliding points are
/// redrawn whole. The stream makes seeded initial conditions reproducible.
Grid random_initial(const std::vector<int>& dims, const std::vector<std::uint8_t>& periodic,
                    std::int64_t n_points, std::uint64_t seed);

Grid random_initial(const std::vector<int>& dims, std::int64_t n_points, std::uint64_t seed);

}  // namespace dcs
