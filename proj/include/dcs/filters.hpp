#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dcs/trajectory.hpp"

namespace dcs {

enum class PatternClass : std::uint8_t { Bank = 0, River = 1, Other = 2 };

/// Match a six-frame temporal word against the cyclic rotations of CBCBAA
/// (Bank, period 6) and CBACBA (River, period 3). Time order is physical:
/// rotations only, no reflections.
PatternClass classify_cell_pattern(std::span<const Cell, 6> states);

/// Per-cell count of A states over the six window frames (0..6), with the
/// Bank/River split where the count is 2.
struct AFilterField {
    std::int64_t center_gap = 0;
    std::vector<int> dims;
    std::vector<std::uint8_t> periodic;
    std::vector<std::uint8_t> values;
    std::vector<PatternClass> pattern;
};

AFilterField a_filter(const FrameWindow& window);

/// Signed change of the unequal-colors indicator on inter-cell boundaries:
/// value = b(t-i) - b(t+1+i). Entry k describes the boundary between cell k
/// and its +1 neighbor along `axis`; on an open axis the rim entries (last
/// coordinate) are not boundaries and stay 0.
struct BFilterField {
    int index = 0;
    int axis = 0;
    std::int64_t center_gap = 0;
    std::vector<int> dims;
    std::vector<std::uint8_t> periodic;
    std::vector<std::int8_t> values;

    bool boundary_exists(std::int64_t cell_index) const;
};

/// The 0/1 unequal-colors indicator for one frame along one axis.
std::vector<std::uint8_t> boundary_indicator(const Grid& g, int axis);

BFilterField b_filter_frames(const Grid& lo, const Grid& hi, int axis);
BFilterField b_filter(Trajectory& run, std::int64_t t, int i, int axis);

/// XOR of the cell's is-A indicator between frames t-i and t+1+i.
struct CFilterField {
    int index = 0;
    std::int64_t center_gap = 0;
    std::vector<int> dims;
    std::vector<std::uint8_t> periodic;
    std::vector<std::uint8_t> values;
};

CFilterField c_filter_frames(const Grid& lo, const Grid& hi);
CFilterField c_filter(Trajectory& run, std::int64_t t, int i);

}  // namespace dcs
