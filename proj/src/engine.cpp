#include "dcs/engine.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace dcs {

Stepper::Stepper(const Grid& start, const Mask& mask)
    : dims_(start.dims()), periodic_(start.periodic_flags()) {
    if (mask.dim() != start.dim())
        throw Error("mask dimension " + std::to_string(mask.dim()) + " does not match grid dimension " +
                    std::to_string(start.dim()));
    n_cells_ = start.size();
    width_ = dims_.back();
    n_rows_ = n_cells_ / width_;
    x_periodic_ = periodic_.back() != 0;

    b_.resize(width_, n_rows_);
    c_.resize(width_, n_rows_);
    m_.resize(width_, n_rows_);
    next_c_.resize(width_, n_rows_);
    scratch_.assign(static_cast<std::size_t>(2 * b_.words_per_row), 0);

    // Group offsets by their outer (row) displacement; rows sharing a dx list
    // share one precomputed shifted-OR plane.
    const int d = start.dim();
    std::map<std::vector<int>, std::vector<int>> groups;
    for (const auto& o : mask.offsets()) {
        std::vector<int> outer(o.begin(), o.end() - 1);
        groups[outer].push_back(o.back());
    }
    std::map<std::vector<int>, int> profile_ids;
    const std::vector<int> outer_dims(dims_.begin(), dims_.end() - 1);
    std::vector<int> out_coords(static_cast<std::size_t>(d - 1));
    for (auto& [outer, dxs] : groups) {
        std::sort(dxs.begin(), dxs.end());
        auto [it, inserted] = profile_ids.try_emplace(dxs, static_cast<int>(profiles_.size()));
        if (inserted) profiles_.push_back(dxs);
        RowGroup rg;
        rg.profile = it->second;
        rg.src_row.resize(static_cast<std::size_t>(n_rows_));
        for (std::int64_t r = 0; r < n_rows_; ++r) {
            std::int64_t rest = r;
            for (int j = d - 2; j >= 0; --j) {
                out_coords[static_cast<std::size_t>(j)] = static_cast<int>(rest % outer_dims[static_cast<std::size_t>(j)]);
                rest /= outer_dims[static_cast<std::size_t>(j)];
            }
            std::int64_t src = 0;
            bool ok = true;
            for (int j = 0; j < d - 1; ++j) {
                int c = out_coords[static_cast<std::size_t>(j)] + outer[static_cast<std::size_t>(j)];
                const int e = outer_dims[static_cast<std::size_t>(j)];
                if (c < 0 || c >= e) {
                    if (!periodic_[static_cast<std::size_t>(j)]) {
                        ok = false;
                        break;
                    }
                    c %= e;
                    if (c < 0) c += e;
                }
                src = src * e + c;
            }
            rg.src_row[static_cast<std::size_t>(r)] = ok ? src : -1;
        }
        row_groups_.push_back(std::move(rg));
    }
    profile_planes_.resize(profiles_.size());
    for (auto& p : profile_planes_) p.resize(width_, n_rows_);

    load(start);
}

void Stepper::load(const Grid& g) {
    if (g.dims() != dims_ || g.periodic_flags() != periodic_)
        throw Error("grid shape does not match the stepper");
    b_.clear();
    c_.clear();
    const auto& cells = g.cells();
    for (std::int64_t i = 0; i < n_cells_; ++i) {
        if (cells[static_cast<std::size_t>(i)] == Cell::B)
            b_.set_linear(i, true);
        else if (cells[static_cast<std::size_t>(i)] == Cell::C)
            c_.set_linear(i, true);
    }
}

Grid Stepper::grid() const {
    Grid g(dims_, periodic_);
    for (std::int64_t i = 0; i < n_cells_; ++i) {
        if (b_.get_linear(i))
            g.set_cell(i, Cell::B);
        else if (c_.get_linear(i))
            g.set_cell(i, Cell::C);
    }
    return g;
}

void Stepper::compute_presence_into(BitLattice& m) {
    const int words = c_.words_per_row;
    const std::uint64_t top = c_.top_mask();
    for (std::size_t p = 0; p < profiles_.size(); ++p) {
        BitLattice& plane = profile_planes_[p];
        plane.clear();
        for (std::int64_t r = 0; r < n_rows_; ++r) {
            std::uint64_t* dst = plane.row(r);
            const std::uint64_t* src = c_.row(r);
            for (int dx : profiles_[p])
                or_shifted_row(dst, src, dx, width_, words, x_periodic_, top, scratch_.data());
        }
    }
    m.clear();
    for (const auto& rg : row_groups_) {
        const BitLattice& plane = profile_planes_[static_cast<std::size_t>(rg.profile)];
        for (std::int64_t r = 0; r < n_rows_; ++r) {
            const std::int64_t s = rg.src_row[static_cast<std::size_t>(r)];
            if (s < 0) continue;
            std::uint64_t* dst = m.row(r);
            const std::uint64_t* src = plane.row(s);
            for (int i = 0; i < words; ++i) dst[i] |= src[i];
        }
    }
}

void Stepper::step_forward() {
    compute_presence_into(m_);
    const std::size_t n = b_.words.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t b = b_.words[i];
        const std::uint64_t c = c_.words[i];
        const std::uint64_t m = m_.words[i];
        next_c_.words[i] = (b & ~m) | (m & ~b & ~c);
        b_.words[i] = c;
    }
    std::swap(c_.words, next_c_.words);
}

void Stepper::step_backward() {
    std::swap(b_.words, c_.words);  // transliteration
    step_forward();
    std::swap(b_.words, c_.words);
}

void Stepper::write_a_plane(BitLattice& out) const {
    out.resize(width_, n_rows_);
    const std::uint64_t top = b_.top_mask();
    const int words = b_.words_per_row;
    for (std::int64_t r = 0; r < n_rows_; ++r) {
        const std::uint64_t* b = b_.row(r);
        const std::uint64_t* c = c_.row(r);
        std::uint64_t* a = out.row(r);
        for (int i = 0; i < words; ++i) a[i] = ~(b[i] | c[i]) & (i == words - 1 ? top : ~0ULL);
    }
}

void Stepper::write_presence(BitLattice& out) {
    out.resize(width_, n_rows_);
    compute_presence_into(out);
}

Grid step_forward(const Grid& g, const Mask& mask) {
    Stepper st(g, mask);
    st.step_forward();
    return st.grid();
}

Grid step_backward(const Grid& g, const Mask& mask) {
    Stepper st(g, mask);
    st.step_backward();
    return st.grid();
}

Grid advance(Grid g, const Mask& mask, std::int64_t steps) {
    Stepper st(g, mask);
    for (std::int64_t i = 0; i < steps; ++i) st.step_forward();
    for (std::int64_t i = 0; i > steps; --i) st.step_backward();
    return st.grid();
}

std::vector<std::uint8_t> c_presence_map(const Grid& g, const Mask& mask) {
    Stepper st(g, mask);
    BitLattice m;
    st.write_presence(m);
    std::vector<std::uint8_t> out(static_cast<std::size_t>(g.size()));
    for (std::int64_t i = 0; i < g.size(); ++i) out[static_cast<std::size_t>(i)] = m.get_linear(i);
    return out;
}

RunOutcome run_to_mirror(const Grid& start, const Mask& mask, std::int64_t max_steps,
                         const FrameCallback& callback) {
    if (max_steps < 1) throw Error("max_steps must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    Stepper st(start, mask);
    RunOutcome out;
    out.nc_series.reserve(static_cast<std::size_t>(std::min<std::int64_t>(max_steps + 1, 1 << 20)));
    out.nc_series.push_back(st.nc());
    if (callback) callback(0, start);
    for (std::int64_t t = 1; t <= max_steps; ++t) {
        st.step_forward();
        out.nc_series.push_back(st.nc());
        if (callback) callback(t, st.grid());
        if (out.nc_series.back() == 0) {
            out.returned = true;
            out.t_half = t;
            break;
        }
    }
    out.final_checksum = grid_checksum(st.grid());
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

namespace naive {

std::vector<std::uint8_t> c_presence_map(const Grid& g, const Mask& mask) {
    if (mask.dim() != g.dim())
        throw Error("mask dimension " + std::to_string(mask.dim()) + " does not match grid dimension " +
                    std::to_string(g.dim()));
    std::vector<std::uint8_t> out(static_cast<std::size_t>(g.size()), 0);
    std::vector<int> v(static_cast<std::size_t>(g.dim()));
    std::vector<int> w(static_cast<std::size_t>(g.dim()));
    for (std::int64_t i = 0; i < g.size(); ++i) {
        v = g.coords(i);
        for (const auto& o : mask.offsets()) {
            for (int j = 0; j < g.dim(); ++j) w[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(j)] + o[static_cast<std::size_t>(j)];
            if (g.at(w) == Cell::C) {
                out[static_cast<std::size_t>(i)] = 1;
                break;
            }
        }
    }
    return out;
}

Grid step_forward(const Grid& g, const Mask& mask) {
    const auto presence = naive::c_presence_map(g, mask);
    Grid out = g;
    for (std::int64_t i = 0; i < g.size(); ++i)
        out.set_cell(i, presence[static_cast<std::size_t>(i)] ? law_two(g.cell(i)) : law_one(g.cell(i)));
    return out;
}

Grid step_backward(const Grid& g, const Mask& mask) {
    return transliterate(naive::step_forward(transliterate(g), mask));
}

}  // namespace naive

}  // namespace dcs
