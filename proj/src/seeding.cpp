#include "dcs/seeding.hpp"

#include "dcs/prng.hpp"

namespace dcs {

Grid random_initial(const std::vector<int>& dims, const std::vector<std::uint8_t>& periodic,
                    std::int64_t n_points, std::uint64_t seed) {
    Grid g(dims, periodic);
    if (n_points < 0) throw Error("n_points must be non-negative");
    if (n_points > g.size())
        throw Error("n_points " + std::to_string(n_points) + " exceeds cell count " +
                    std::to_string(g.size()));
    SplitMix64 rng(seed);
    std::vector<int> coords(dims.size());
    std::int64_t placed = 0;
    while (placed < n_points) {
        for (std::size_t j = 0; j < dims.size(); ++j)
            coords[j] = static_cast<int>(rng.next() % static_cast<std::uint64_t>(dims[j]));
        const std::int64_t idx = g.index(coords);
        if (g.cell(idx) == Cell::B) continue;  // collision: redraw the whole point
        g.set_cell(idx, Cell::B);
        ++placed;
    }
    return g;
}

Grid random_initial(const std::vector<int>& dims, std::int64_t n_points, std::uint64_t seed) {
    return random_initial(dims, std::vector<std::uint8_t>(dims.size(), std::uint8_t{1}), n_points, seed);
}

}  // namespace dcs
