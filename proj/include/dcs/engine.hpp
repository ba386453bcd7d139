#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dcs/bitlattice.hpp"
#include "dcs/grid.hpp"
#include "dcs/mask.hpp"

namespace dcs {

// Word-parallel stepper. States live in two bit planes (B and C; A is
// neither); the C-presence lattice is built by OR-ing the C plane shifted
// over every mask offset, then both laws collapse to two boolean formulas:
//   new_B = C                      (both laws send C to B)
//   new_C = (B & ~m) | (m & ~B & ~C)
// where m marks cells whose mask sees at least one C.
class Stepper {
public:
    Stepper(const Grid& start, const Mask& mask);

    void load(const Grid& g);
    Grid grid() const;

    void step_forward();
    /// Exact inverse of step_forward: transliterate, step, transliterate.
    void step_backward();

    std::int64_t nc() const { return c_.popcount(); }
    std::int64_t nb() const { return b_.popcount(); }
    std::int64_t na() const { return n_cells_ - nb() - nc(); }
    std::int64_t size() const { return n_cells_; }
    const std::vector<int>& dims() const { return dims_; }
    const std::vector<std::uint8_t>& periodic_flags() const { return periodic_; }

    void write_a_plane(BitLattice& out) const;
    void write_presence(BitLattice& out);

private:
    void compute_presence_into(BitLattice& m);

    std::vector<int> dims_;
    std::vector<std::uint8_t> periodic_;
    std::int64_t n_cells_ = 0;
    int width_ = 0;
    std::int64_t n_rows_ = 0;
    bool x_periodic_ = false;

    BitLattice b_, c_, m_, next_c_;
    std::vector<BitLattice> profile_planes_;
    std::vector<std::vector<int>> profiles_;  // distinct dx lists
    struct RowGroup {
        int profile;
        std::vector<std::int64_t> src_row;  // per output row; -1 = outside an open axis
    };
    std::vector<RowGroup> row_groups_;
    std::vector<std::uint64_t> scratch_;
};

Grid step_forward(const Grid& g, const Mask& mask);
Grid step_backward(const Grid& g, const Mask& mask);
Grid advance(Grid g, const Mask& mask, std::int64_t steps);  // negative steps run backward

/// True where some mask offset lands on a C under the grid's boundary rules.
std::vector<std::uint8_t> c_presence_map(const Grid& g, const Mask& mask);

struct RunOutcome {
    bool returned = false;
    std::optional<std::int64_t> t_half;
    std::vector<std::int64_t> nc_series;  // per step, 0..t_end
    double wall_seconds = 0.0;
    std::uint64_t final_checksum = 0;
};

using FrameCallback = std::function<void(std::int64_t t, const Grid& frame)>;

/// Step forward until the first t >= 1 with N_C = 0 (the mirror point) or
/// until max_steps. Callbacks, when given, receive every frame including the
/// start.
RunOutcome run_to_mirror(const Grid& start, const Mask& mask, std::int64_t max_steps,
                         const FrameCallback& callback = {});

// Double-loop reference engine. Kept as the oracle for the word-parallel
// path; every fast-path behavior must match it bit-exactly.
namespace naive {
std::vector<std::uint8_t> c_presence_map(const Grid& g, const Mask& mask);
Grid step_forward(const Grid& g, const Mask& mask);
Grid step_backward(const Grid& g, const Mask& mask);
}  // namespace naive

}  // namespace dcs
