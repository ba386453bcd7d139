#include "dcs/bitlattice.hpp"

#include <bit>

namespace dcs {

std::int64_t BitLattice::popcount() const {
    std::int64_t n = 0;
    for (std::uint64_t w : words) n += std::popcount(w);
    return n;
}

namespace {

// dst = src >> s over `words` little-endian words, zero fill from the top.
inline void shr_into(std::uint64_t* dst, const std::uint64_t* src, int s, int words) {
    const int k = s >> 6, b = s & 63;
    for (int i = 0; i < words; ++i) {
        const std::uint64_t lo = (i + k < words) ? src[i + k] : 0;
        const std::uint64_t hi = (b && i + k + 1 < words) ? src[i + k + 1] : 0;
        dst[i] = b ? (lo >> b) | (hi << (64 - b)) : lo;
    }
}

// dst = src << s; caller masks bits past the logical width.
inline void shl_into(std::uint64_t* dst, const std::uint64_t* src, int s, int words) {
    const int k = s >> 6, b = s & 63;
    for (int i = words - 1; i >= 0; --i) {
        const std::uint64_t lo = (i - k >= 0) ? src[i - k] : 0;
        const std::uint64_t hi = (b && i - k - 1 >= 0) ? src[i - k - 1] : 0;
        dst[i] = b ? (lo << b) | (hi >> (64 - b)) : lo;
    }
}

}  // namespace

void or_shifted_row(std::uint64_t* dst, const std::uint64_t* src, int shift, int width, int words,
                    bool periodic, std::uint64_t top_mask, std::uint64_t* scratch) {
    if (periodic) {
        int s = shift % width;
        if (s < 0) s += width;
        if (s == 0) {
            for (int i = 0; i < words; ++i) dst[i] |= src[i];
            return;
        }
        std::uint64_t* lo = scratch;
        std::uint64_t* hi = scratch + words;
        shr_into(lo, src, s, words);
        shl_into(hi, src, width - s, words);
        for (int i = 0; i < words; ++i) {
            std::uint64_t v = lo[i] | hi[i];
            if (i == words - 1) v &= top_mask;
            dst[i] |= v;
        }
        return;
    }
    if (shift >= width || shift <= -width) return;
    if (shift >= 0) {
        shr_into(scratch, src, shift, words);
        for (int i = 0; i < words; ++i) dst[i] |= scratch[i];
    } else {
        shl_into(scratch, src, -shift, words);
        for (int i = 0; i < words; ++i) dst[i] |= (i == words - 1) ? (scratch[i] & top_mask) : scratch[i];
    }
}

}  // namespace dcs
