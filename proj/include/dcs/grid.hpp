#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcs/cell.hpp"

namespace dcs {

/// Per-axis boundary: 'P' (periodic, coordinates wrap) or 'O' (open, out-of-range reads are A).
std::vector<std::uint8_t> parse_boundary_flags(std::string_view flags, int dim);
std::string format_boundary_flags(std::span<const std::uint8_t> periodic);

/// Dense d-dimensional lattice of cells, row-major with the last axis fastest.
class Grid {
public:
    Grid(std::vector<int> dims, std::vector<std::uint8_t> periodic);

    /// All-periodic convenience constructor.
    explicit Grid(std::vector<int> dims);

    static Grid parse(std::string_view text);
    std::string to_text() const;
    std::vector<std::string> to_rows() const;
    static Grid from_rows(const std::vector<int>& dims, std::string_view boundary,
                          const std::vector<std::string>& rows);

    int dim() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    std::int64_t size() const { return static_cast<std::int64_t>(cells_.size()); }
    bool periodic(int axis) const { return periodic_[axis] != 0; }
    const std::vector<std::uint8_t>& periodic_flags() const { return periodic_; }

    /// Read with boundary semantics: periodic axes wrap, open axes clip to A.
    Cell at(std::span<const int> coords) const;
    void set(std::span<const int> coords, Cell c);

    Cell cell(std::int64_t i) const { return cells_[static_cast<std::size_t>(i)]; }
    void set_cell(std::int64_t i, Cell c) { cells_[static_cast<std::size_t>(i)] = c; }
    const std::vector<Cell>& cells() const { return cells_; }

    /// Row-major linear index of in-range coordinates.
    std::int64_t index(std::span<const int> coords) const;
    std::vector<int> coords(std::int64_t index) const;

    bool operator==(const Grid&) const = default;

private:
    std::vector<int> dims_;
    std::vector<std::uint8_t> periodic_;
    std::vector<Cell> cells_;
};

struct StateCounts {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;
    bool operator==(const StateCounts&) const = default;
};

StateCounts count_states(const Grid& g);
Grid transliterate(const Grid& g);

/// FNV-1a over dims, boundary and cell bytes; stable across platforms.
std::uint64_t grid_checksum(const Grid& g);

}  // namespace dcs
