#include "dcs/filters.hpp"

#include <array>

namespace dcs {

namespace {

// word -> class over all 3^6 six-frame words, built once from the rotation
// sets of CBCBAA and CBACBA. Word code: sum of state[k] * 3^k.
std::array<std::uint8_t, 729> build_pattern_table() {
    std::array<std::uint8_t, 729> table;
    table.fill(static_cast<std::uint8_t>(PatternClass::Other));
    auto code_of = [](const char* word, int rot) {
        int code = 0, p = 1;
        for (int k = 0; k < 6; ++k) {
            const char ch = word[(k + rot) % 6];
            const int s = ch == 'A' ? 0 : ch == 'B' ? 1 : 2;
            code += s * p;
            p *= 3;
        }
        return code;
    };
    for (int rot = 0; rot < 6; ++rot) {
        table[static_cast<std::size_t>(code_of("CBCBAA", rot))] = static_cast<std::uint8_t>(PatternClass::Bank);
        table[static_cast<std::size_t>(code_of("CBACBA", rot))] = static_cast<std::uint8_t>(PatternClass::River);
    }
    return table;
}

const std::array<std::uint8_t, 729>& pattern_table() {
    static const auto table = build_pattern_table();
    return table;
}

}  // namespace

PatternClass classify_cell_pattern(std::span<const Cell, 6> states) {
    int code = 0, p = 1;
    for (int k = 0; k < 6; ++k) {
        code += static_cast<int>(states[static_cast<std::size_t>(k)]) * p;
        p *= 3;
    }
    return static_cast<PatternClass>(pattern_table()[static_cast<std::size_t>(code)]);
}

AFilterField a_filter(const FrameWindow& window) {
    const Grid& g0 = window.frames.front();
    AFilterField f;
    f.center_gap = window.center_gap;
    f.dims = g0.dims();
    f.periodic = g0.periodic_flags();
    const std::int64_t n = g0.size();
    f.values.assign(static_cast<std::size_t>(n), 0);
    f.pattern.assign(static_cast<std::size_t>(n), PatternClass::Other);
    const auto& table = pattern_table();
    for (std::int64_t i = 0; i < n; ++i) {
        int count = 0, code = 0, p = 1;
        for (int k = 0; k < 6; ++k) {
            const Cell s = window.frames[static_cast<std::size_t>(k)].cell(i);
            count += s == Cell::A;
            code += static_cast<int>(s) * p;
            p *= 3;
        }
        f.values[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(count);
        if (count == 2) f.pattern[static_cast<std::size_t>(i)] = static_cast<PatternClass>(table[static_cast<std::size_t>(code)]);
    }
    return f;
}

std::vector<std::uint8_t> boundary_indicator(const Grid& g, int axis) {
    const auto& dims = g.dims();
    const int d = g.dim();
    std::int64_t stride = 1;
    for (int j = d - 1; j > axis; --j) stride *= dims[static_cast<std::size_t>(j)];
    const int extent = dims[static_cast<std::size_t>(axis)];
    const bool wrap = g.periodic(axis);
    const std::int64_t n = g.size();
    std::vector<std::uint8_t> out(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 0; i < n; ++i) {
        const int c = static_cast<int>((i / stride) % extent);
        std::int64_t j;
        if (c + 1 < extent)
            j = i + stride;
        else if (wrap)
            j = i - static_cast<std::int64_t>(extent - 1) * stride;
        else
            continue;  // open rim: no boundary
        out[static_cast<std::size_t>(i)] = g.cell(i) != g.cell(j);
    }
    return out;
}

bool BFilterField::boundary_exists(std::int64_t cell_index) const {
    if (periodic[static_cast<std::size_t>(axis)]) return true;
    std::int64_t stride = 1;
    for (int j = static_cast<int>(dims.size()) - 1; j > axis; --j) stride *= dims[static_cast<std::size_t>(j)];
    return (cell_index / stride) % dims[static_cast<std::size_t>(axis)] + 1 < dims[static_cast<std::size_t>(axis)];
}

BFilterField b_filter_frames(const Grid& lo, const Grid& hi, int axis) {
    if (lo.dims() != hi.dims()) throw Error("b_filter frames disagree on dims");
    if (axis < 0 || axis >= lo.dim()) throw Error("b_filter axis out of range");
    BFilterField f;
    f.axis = axis;
    f.dims = lo.dims();
    f.periodic = lo.periodic_flags();
    const auto b_lo = boundary_indicator(lo, axis);
    const auto b_hi = boundary_indicator(hi, axis);
    f.values.resize(b_lo.size());
    for (std::size_t i = 0; i < b_lo.size(); ++i)
        f.values[i] = static_cast<std::int8_t>(static_cast<int>(b_lo[i]) - static_cast<int>(b_hi[i]));
    return f;
}

BFilterField b_filter(Trajectory& run, std::int64_t t, int i, int axis) {
    if (i < 0 || i > 2) throw Error("b_filter index must be in {0,1,2}");
    const Grid lo = run.frame(t - i);
    const Grid hi = run.frame(t + 1 + i);
    BFilterField f = b_filter_frames(lo, hi, axis);
    f.index = i;
    f.center_gap = t;
    return f;
}

CFilterField c_filter_frames(const Grid& lo, const Grid& hi) {
    if (lo.dims() != hi.dims()) throw Error("c_filter frames disagree on dims");
    CFilterField f;
    f.dims = lo.dims();
    f.periodic = lo.periodic_flags();
    const std::int64_t n = lo.size();
    f.values.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        f.values[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>((lo.cell(i) == Cell::A) != (hi.cell(i) == Cell::A));
    return f;
}

CFilterField c_filter(Trajectory& run, std::int64_t t, int i) {
    if (i < 0 || i > 2) throw Error("c_filter index must be in {0,1,2}");
    const Grid lo = run.frame(t - i);
    const Grid hi = run.frame(t + 1 + i);
    CFilterField f = c_filter_frames(lo, hi);
    f.index = i;
    f.center_gap = t;
    return f;
}

}  // namespace dcs
