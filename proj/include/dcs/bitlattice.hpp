#pragma once

#include <cstdint>
#include <vector>

namespace dcs {

// One bit per cell. The last (fastest) axis is packed into 64-bit words; every
// other axis indexes a row. Bits past the logical width of a row are kept zero
// by all operations, which the word-parallel step relies on.
struct BitLattice {
    int width = 0;
    std::int64_t n_rows = 0;
    int words_per_row = 0;
    std::vector<std::uint64_t> words;

    BitLattice() = default;
    BitLattice(int width_, std::int64_t n_rows_) { resize(width_, n_rows_); }

    void resize(int width_, std::int64_t n_rows_) {
        width = width_;
        n_rows = n_rows_;
        words_per_row = (width + 63) / 64;
        words.assign(static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(words_per_row), 0);
    }

    void clear() { std::fill(words.begin(), words.end(), 0ULL); }

    std::uint64_t* row(std::int64_t r) { return words.data() + r * words_per_row; }
    const std::uint64_t* row(std::int64_t r) const { return words.data() + r * words_per_row; }

    bool get(std::int64_t r, int x) const { return (row(r)[x >> 6] >> (x & 63)) & 1; }
    void set(std::int64_t r, int x, bool v) {
        std::uint64_t& w = row(r)[x >> 6];
        const std::uint64_t bit = 1ULL << (x & 63);
        w = v ? (w | bit) : (w & ~bit);
    }
    bool get_linear(std::int64_t i) const { return get(i / width, static_cast<int>(i % width)); }
    void set_linear(std::int64_t i, bool v) { set(i / width, static_cast<int>(i % width), v); }

    std::uint64_t top_mask() const {
        const int m = width & 63;
        return m ? (1ULL << m) - 1 : ~0ULL;
    }

    std::int64_t popcount() const;

    bool operator==(const BitLattice&) const = default;
};

// dst_row |= src_row viewed through a shift along the packed axis:
// dst(x) picks up src(x + shift). Periodic rows rotate modulo the width;
// open rows read zeros outside [0, width). scratch must hold 2*words values.
void or_shifted_row(std::uint64_t* dst, const std::uint64_t* src, int shift, int width, int words,
                    bool periodic, std::uint64_t top_mask, std::uint64_t* scratch);

}  // namespace dcs
