#include "dcs/structures.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace dcs {

namespace {

// Union-find carrying, per node, its displacement from the parent in the
// universal cover. Closing a cycle whose displacements do not cancel means
// the component winds around the torus along the uncancelled axes.
class OffsetUnionFind {
public:
    OffsetUnionFind(std::int64_t n, int dim)
        : dim_(dim),
          parent_(static_cast<std::size_t>(n)),
          rank_(static_cast<std::size_t>(n), 0),
          wraps_(static_cast<std::size_t>(n), 0),
          disp_(static_cast<std::size_t>(n) * static_cast<std::size_t>(dim), 0) {
        for (std::int64_t i = 0; i < n; ++i) parent_[static_cast<std::size_t>(i)] = i;
    }

    std::int64_t find(std::int64_t x) {
        chain_.clear();
        std::int64_t r = x;
        while (parent_[static_cast<std::size_t>(r)] != r) {
            chain_.push_back(r);
            r = parent_[static_cast<std::size_t>(r)];
        }
        // path compression, accumulating displacements from the root down
        std::int64_t prev_sum[kMaxDim] = {};
        for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) {
            std::int64_t* d = disp(*it);
            for (int j = 0; j < dim_; ++j) {
                d[j] += prev_sum[j];
                prev_sum[j] = d[j];
            }
            parent_[static_cast<std::size_t>(*it)] = r;
        }
        return r;
    }

    // cover_pos(b) = cover_pos(a) + delta
    void unite(std::int64_t a, std::int64_t b, const int* delta) {
        const std::int64_t ra = find(a);
        const std::int64_t rb = find(b);
        const std::int64_t* da = disp(a);
        const std::int64_t* db = disp(b);
        if (ra == rb) {
            for (int j = 0; j < dim_; ++j)
                if (da[j] + delta[j] - db[j] != 0) wraps_[static_cast<std::size_t>(ra)] |= 1u << j;
            return;
        }
        std::int64_t attach[kMaxDim];
        for (int j = 0; j < dim_; ++j) attach[j] = delta[j] + da[j] - db[j];
        std::int64_t hi = ra, lo = rb;
        if (rank_[static_cast<std::size_t>(hi)] < rank_[static_cast<std::size_t>(lo)]) {
            std::swap(hi, lo);
            for (int j = 0; j < dim_; ++j) attach[j] = -attach[j];
        }
        parent_[static_cast<std::size_t>(lo)] = hi;
        std::int64_t* dl = disp(lo);
        for (int j = 0; j < dim_; ++j) dl[j] = attach[j];
        wraps_[static_cast<std::size_t>(hi)] |= wraps_[static_cast<std::size_t>(lo)];
        if (rank_[static_cast<std::size_t>(hi)] == rank_[static_cast<std::size_t>(lo)]) ++rank_[static_cast<std::size_t>(hi)];
    }

    std::uint32_t wraps_of_root(std::int64_t root) const { return wraps_[static_cast<std::size_t>(root)]; }

    static constexpr int kMaxDim = 8;

private:
    std::int64_t* disp(std::int64_t x) { return disp_.data() + static_cast<std::size_t>(x) * static_cast<std::size_t>(dim_); }
    const std::int64_t* disp(std::int64_t x) const { return disp_.data() + static_cast<std::size_t>(x) * static_cast<std::size_t>(dim_); }

    int dim_;
    std::vector<std::int64_t> parent_;
    std::vector<std::uint8_t> rank_;
    std::vector<std::uint32_t> wraps_;
    std::vector<std::int64_t> disp_;
    std::vector<std::int64_t> chain_;
};

std::vector<std::vector<int>> moore_offsets(int dim) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(dim), -1);
    while (true) {
        if (std::any_of(cur.begin(), cur.end(), [](int c) { return c != 0; })) out.push_back(cur);
        int j = dim - 1;
        while (j >= 0 && cur[static_cast<std::size_t>(j)] == 1) {
            cur[static_cast<std::size_t>(j)] = -1;
            --j;
        }
        if (j < 0) break;
        ++cur[static_cast<std::size_t>(j)];
    }
    return out;
}

}  // namespace

std::vector<Component> label_components(std::span<const std::uint8_t> marked,
                                        const std::vector<int>& dims,
                                        const std::vector<std::uint8_t>& periodic) {
    const int d = static_cast<int>(dims.size());
    if (d > OffsetUnionFind::kMaxDim) throw Error("label_components supports up to 8 dimensions");
    std::int64_t n = 1;
    for (int e : dims) n *= e;
    if (static_cast<std::int64_t>(marked.size()) != n) throw Error("marked lattice size does not match dims");

    std::vector<std::int64_t> strides(static_cast<std::size_t>(d), 1);
    for (int j = d - 2; j >= 0; --j) strides[static_cast<std::size_t>(j)] = strides[static_cast<std::size_t>(j + 1)] * dims[static_cast<std::size_t>(j + 1)];

    // keep only the lexicographically positive half: each undirected edge once
    auto offsets = moore_offsets(d);
    offsets.erase(std::remove_if(offsets.begin(), offsets.end(),
                                 [](const std::vector<int>& o) {
                                     for (int c : o) {
                                         if (c > 0) return false;
                                         if (c < 0) return true;
                                     }
                                     return true;
                                 }),
                  offsets.end());

    OffsetUnionFind uf(n, d);
    std::vector<int> coords(static_cast<std::size_t>(d));
    for (std::int64_t i = 0; i < n; ++i) {
        if (!marked[static_cast<std::size_t>(i)]) continue;
        std::int64_t rest = i;
        for (int j = 0; j < d; ++j) {
            coords[static_cast<std::size_t>(j)] = static_cast<int>(rest / strides[static_cast<std::size_t>(j)]);
            rest %= strides[static_cast<std::size_t>(j)];
        }
        for (const auto& o : offsets) {
            std::int64_t nb = 0;
            bool ok = true;
            for (int j = 0; j < d; ++j) {
                int c = coords[static_cast<std::size_t>(j)] + o[static_cast<std::size_t>(j)];
                const int e = dims[static_cast<std::size_t>(j)];
                if (c < 0 || c >= e) {
                    if (!periodic[static_cast<std::size_t>(j)]) {
                        ok = false;
                        break;
                    }
                    c = c < 0 ? c + e : c - e;
                }
                nb += c * strides[static_cast<std::size_t>(j)];
            }
            if (!ok || !marked[static_cast<std::size_t>(nb)]) continue;
            uf.unite(i, nb, o.data());
        }
    }

    std::map<std::int64_t, std::vector<std::int64_t>> by_root;
    for (std::int64_t i = 0; i < n; ++i)
        if (marked[static_cast<std::size_t>(i)]) by_root[uf.find(i)].push_back(i);

    std::vector<Component> out;
    out.reserve(by_root.size());
    for (auto& [root, cells] : by_root) {
        Component comp;
        comp.cells = std::move(cells);  // ascending by construction
        comp.size = static_cast<std::int64_t>(comp.cells.size());
        const std::uint32_t w = uf.wraps_of_root(root);
        comp.wraps.resize(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) comp.wraps[static_cast<std::size_t>(j)] = (w >> j) & 1;
        out.push_back(std::move(comp));
    }
    // ids follow the lattice order of each component's first cell
    std::sort(out.begin(), out.end(),
              [](const Component& a, const Component& b) { return a.cells.front() < b.cells.front(); });
    for (std::size_t k = 0; k < out.size(); ++k) out[k].id = static_cast<int>(k);
    return out;
}

std::vector<RiverComponent> label_river_components(const AFilterField& af) {
    std::vector<std::uint8_t> marked(af.pattern.size(), 0);
    for (std::size_t i = 0; i < af.pattern.size(); ++i)
        marked[i] = af.values[i] == 2 && af.pattern[i] == PatternClass::River;
    return label_components(marked, af.dims, af.periodic);
}

bool window_has_wrapping_river(const FrameWindow& window) {
    const auto comps = label_river_components(a_filter(window));
    for (const auto& c : comps)
        for (bool w : c.wraps)
            if (w) return true;
    return false;
}

bool detect_superriver_early(Trajectory& run, std::int64_t horizon) {
    for (std::int64_t t = 0; t <= horizon; ++t) {
        if (window_has_wrapping_river(frame_window(run, t))) return true;
    }
    return false;
}

namespace {

bool has_cyclic_period(const std::array<Cell, 12>& w, int p) {
    for (int k = 0; k < 12; ++k)
        if (w[static_cast<std::size_t>(k)] != w[static_cast<std::size_t>((k + p) % 12)]) return false;
    return true;
}

int minimal_cyclic_period(const std::array<Cell, 12>& w) {
    for (int p : {1, 2, 3, 4, 6})
        if (has_cyclic_period(w, p)) return p;
    return 12;
}

// valid linear index of coords, wrapping periodic axes; nullopt outside open axes
std::optional<std::int64_t> locate(const Grid& g, std::vector<int> coords) {
    std::int64_t idx = 0;
    for (int j = 0; j < g.dim(); ++j) {
        int c = coords[static_cast<std::size_t>(j)];
        const int e = g.dims()[static_cast<std::size_t>(j)];
        if (c < 0 || c >= e) {
            if (!g.periodic(j)) return std::nullopt;
            c %= e;
            if (c < 0) c += e;
        }
        idx = idx * e + c;
    }
    return idx;
}

// signed boundary change between two frames across the edge (u, u+e_axis);
// nullopt when the edge does not exist (open rim or out of range)
std::optional<std::int8_t> edge_value(const Grid& lo, const Grid& hi, const std::vector<int>& u, int axis) {
    std::vector<int> v = u;
    ++v[static_cast<std::size_t>(axis)];
    const auto iu = locate(lo, u);
    const auto iv = locate(lo, v);
    if (!iu || !iv) return std::nullopt;
    const int b_lo = lo.cell(*iu) != lo.cell(*iv);
    const int b_hi = hi.cell(*iu) != hi.cell(*iv);
    return static_cast<std::int8_t>(b_lo - b_hi);
}

bool white_only(const std::vector<std::int8_t>& outline) {
    bool any = false;
    for (auto v : outline) {
        if (v > 0) return false;
        if (v < 0) any = true;
    }
    return any;
}

std::vector<std::int8_t> negate(const std::vector<std::int8_t>& v) {
    std::vector<std::int8_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<std::int8_t>(-v[i]);
    return out;
}

}  // namespace

std::vector<NullRiverSighting> detect_nullrivers_frames(std::span<const Grid> frames, const Mask& mask,
                                                        std::optional<int> radius) {
    if (frames.size() != 13) throw Error("nullriver detection needs the 13 frames t-5..t+7");
    const Grid& g0 = frames[0];
    const int d = g0.dim();
    const int rho = radius.value_or(mask.rank());
    const std::int64_t n = g0.size();

    // per-cell 12-frame words and minimal cyclic periods
    std::vector<std::array<Cell, 12>> words(static_cast<std::size_t>(n));
    for (int k = 0; k < 12; ++k)
        for (std::int64_t i = 0; i < n; ++i) words[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = frames[static_cast<std::size_t>(k)].cell(i);
    std::vector<std::uint8_t> period(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 0; i < n; ++i)
        period[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(minimal_cyclic_period(words[static_cast<std::size_t>(i)]));

    // Chebyshev ball offsets (excluding the center)
    std::vector<std::vector<int>> ball;
    {
        std::vector<int> cur(static_cast<std::size_t>(d), -rho);
        while (true) {
            if (std::any_of(cur.begin(), cur.end(), [](int c) { return c != 0; })) ball.push_back(cur);
            int j = d - 1;
            while (j >= 0 && cur[static_cast<std::size_t>(j)] == rho) {
                cur[static_cast<std::size_t>(j)] = -rho;
                --j;
            }
            if (j < 0) break;
            ++cur[static_cast<std::size_t>(j)];
        }
    }

    std::vector<NullRiverSighting> out;
    std::vector<int> coords(static_cast<std::size_t>(d)), nb(static_cast<std::size_t>(d));
    for (std::int64_t i = 0; i < n; ++i) {
        if (period[static_cast<std::size_t>(i)] != 12) continue;
        coords = g0.coords(i);

        // the point's own mask footprint legitimately doubles its rhythm;
        // everything else nearby must be Bank (period 1, 2 or 6), with no
        // River (period 3) and no foreign period-12 point in the ball
        std::set<std::int64_t> footprint;
        for (const auto& o : mask.offsets()) {
            for (int j = 0; j < d; ++j) nb[static_cast<std::size_t>(j)] = coords[static_cast<std::size_t>(j)] + o[static_cast<std::size_t>(j)];
            if (auto idx = locate(g0, nb)) footprint.insert(*idx);
        }
        bool isolated = true;
        for (const auto& o : ball) {
            for (int j = 0; j < d; ++j) nb[static_cast<std::size_t>(j)] = coords[static_cast<std::size_t>(j)] + o[static_cast<std::size_t>(j)];
            const auto idx = locate(g0, nb);
            if (!idx) continue;  // outside an open axis: constant A, period 1
            const int p = period[static_cast<std::size_t>(*idx)];
            if (p == 3 || p == 4 || (p == 12 && !footprint.count(*idx))) {
                isolated = false;
                break;
            }
        }
        if (!isolated) continue;

        NullRiverSighting s;
        s.cell = coords;
        s.word = words[static_cast<std::size_t>(i)];

        // center outline: per phase, the cell's own 2d faces
        s.center_outline.resize(12);
        for (int p = 0; p < 12; ++p) {
            auto& line = s.center_outline[static_cast<std::size_t>(p)];
            line.assign(static_cast<std::size_t>(2 * d), 0);
            for (int j = 0; j < d; ++j) {
                std::vector<int> u = coords;
                --u[static_cast<std::size_t>(j)];
                if (auto v = edge_value(frames[static_cast<std::size_t>(p)], frames[static_cast<std::size_t>(p + 1)], u, j))
                    line[static_cast<std::size_t>(2 * j)] = *v;
                if (auto v = edge_value(frames[static_cast<std::size_t>(p)], frames[static_cast<std::size_t>(p + 1)], coords, j))
                    line[static_cast<std::size_t>(2 * j + 1)] = *v;
            }
        }

        // footprint outline: rim edges of the mask region around the cell
        std::set<std::int64_t> region;
        if (auto c0 = locate(g0, coords)) region.insert(*c0);
        for (const auto& o : mask.offsets()) {
            for (int j = 0; j < d; ++j) nb[static_cast<std::size_t>(j)] = coords[static_cast<std::size_t>(j)] + o[static_cast<std::size_t>(j)];
            if (auto idx = locate(g0, nb)) region.insert(*idx);
        }
        struct RimEdge {
            std::vector<int> u;
            int axis;
        };
        std::vector<RimEdge> rim;
        for (std::int64_t cell_idx : region) {
            const auto cc = g0.coords(cell_idx);
            for (int j = 0; j < d; ++j) {
                for (int dir : {-1, +1}) {
                    std::vector<int> w = cc;
                    w[static_cast<std::size_t>(j)] += dir;
                    const auto widx = locate(g0, w);
                    if (widx && region.count(*widx)) continue;  // interior edge
                    // normalize the edge to (lower cell, axis)
                    std::vector<int> lowc = dir < 0 ? w : cc;
                    rim.push_back({std::move(lowc), j});
                }
            }
        }
        std::sort(rim.begin(), rim.end(), [&](const RimEdge& a, const RimEdge& b) {
            return std::tie(a.u, a.axis) < std::tie(b.u, b.axis);
        });
        s.footprint_outline.resize(12);
        for (int p = 0; p < 12; ++p) {
            auto& line = s.footprint_outline[static_cast<std::size_t>(p)];
            line.reserve(rim.size());
            for (const auto& e : rim) {
                auto v = edge_value(frames[static_cast<std::size_t>(p)], frames[static_cast<std::size_t>(p + 1)], e.u, e.axis);
                line.push_back(v.value_or(0));
            }
        }

        // canonical rotation: phases 1 and 8 white-only, 11 opposite 1, 4 opposite 8
        for (int r = 0; r < 12 && !s.conforming; ++r) {
            const auto& w1 = s.center_outline[static_cast<std::size_t>((1 + r) % 12)];
            const auto& w2 = s.center_outline[static_cast<std::size_t>((8 + r) % 12)];
            if (!white_only(w1) || !white_only(w2)) continue;
            if (s.center_outline[static_cast<std::size_t>((11 + r) % 12)] != negate(w1)) continue;
            if (s.center_outline[static_cast<std::size_t>((4 + r) % 12)] != negate(w2)) continue;
            s.conforming = true;
            s.phase_offset = r;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<NullRiverSighting> detect_nullrivers(Trajectory& run, std::int64_t t, std::optional<int> radius) {
    std::vector<Grid> frames;
    frames.reserve(13);
    for (std::int64_t u = t - 5; u <= t + 7; ++u) frames.push_back(run.frame(u));
    return detect_nullrivers_frames(frames, run.mask(), radius);
}

namespace {

std::string outline_string(const std::vector<std::int8_t>& line) {
    std::string s;
    s.reserve(line.size());
    for (auto v : line) s += v == 0 ? '0' : v < 0 ? '-' : '+';
    return s;
}

}  // namespace

SignatureStats nullriver_signature_scan(std::span<const NullRiverSighting> sightings, const Grid* initial) {
    SignatureStats stats;
    stats.n_sightings = static_cast<std::int64_t>(sightings.size());
    stats.phase_patterns.resize(12);
    std::vector<std::map<std::string, std::int64_t>> tab(12);

    std::vector<std::vector<int>> b_cells;
    if (initial) {
        for (std::int64_t i = 0; i < initial->size(); ++i)
            if (initial->cell(i) == Cell::B) b_cells.push_back(initial->coords(i));
    }

    for (const auto& s : sightings) {
        if (!s.conforming) {
            ++stats.n_nonconforming;
            continue;
        }
        ++stats.n_conforming;
        const int r = s.phase_offset;
        for (int p = 0; p < 12; ++p)
            ++tab[static_cast<std::size_t>(p)][outline_string(s.center_outline[static_cast<std::size_t>((p + r) % 12)])];

        const auto& w1 = s.center_outline[static_cast<std::size_t>((1 + r) % 12)];
        const auto& w2 = s.center_outline[static_cast<std::size_t>((8 + r) % 12)];
        bool covers = true;
        for (std::size_t f = 0; f < w1.size(); ++f)
            if (w1[f] == 0 && w2[f] == 0) covers = false;
        if (covers) ++stats.closes_square;

        if (w1.size() == 4) {  // 2D: faces ordered y-, y+, x-, x+
            auto faces = [](const std::vector<std::int8_t>& w) {
                std::set<int> f;
                for (int k = 0; k < 4; ++k)
                    if (w[static_cast<std::size_t>(k)] != 0) f.insert(k);
                return f;
            };
            const auto f1 = faces(w1), f2 = faces(w2);
            const std::set<int> bl{0, 2}, tr{1, 3}, br{0, 3}, tl{1, 2};
            const bool diag = (f1 == bl && f2 == tr) || (f1 == tr && f2 == bl) ||
                              (f1 == br && f2 == tl) || (f1 == tl && f2 == br);
            if (diag) ++stats.diagonal_counterexamples;
        }
    }
    for (int p = 0; p < 12; ++p)
        stats.phase_patterns[static_cast<std::size_t>(p)].assign(tab[static_cast<std::size_t>(p)].begin(), tab[static_cast<std::size_t>(p)].end());

    if (initial) {
        for (const auto& s : sightings) {
            double best = -1;
            for (const auto& b : b_cells) {
                double dist = 0;
                for (std::size_t j = 0; j < b.size(); ++j) {
                    const int e = initial->dims()[j];
                    int diff = std::abs(s.cell[j] - b[j]);
                    if (initial->periodic(static_cast<int>(j))) diff = std::min(diff, e - diff);
                    dist = std::max(dist, static_cast<double>(diff));
                }
                if (best < 0 || dist < best) best = dist;
            }
            stats.distance_to_initial_b.push_back(best);
        }
    }
    return stats;
}

std::string signature_stats_csv(const SignatureStats& stats) {
    std::ostringstream os;
    os << "phase,pattern,count\n";
    for (int p = 0; p < 12; ++p)
        for (const auto& [pat, cnt] : stats.phase_patterns[static_cast<std::size_t>(p)])
            os << p + 1 << ',' << pat << ',' << cnt << '\n';
    os << "summary,sightings," << stats.n_sightings << '\n';
    os << "summary,conforming," << stats.n_conforming << '\n';
    os << "summary,nonconforming," << stats.n_nonconforming << '\n';
    os << "summary,closes_square," << stats.closes_square << '\n';
    os << "summary,diagonal_counterexamples," << stats.diagonal_counterexamples << '\n';
    return os.str();
}

std::vector<LocalReversalEvent> detect_local_reversals(std::span<const std::int64_t> nc_series,
                                                       std::int64_t threshold, std::int64_t window) {
    const std::int64_t n = static_cast<std::int64_t>(nc_series.size());
    std::vector<LocalReversalEvent> out;
    if (n < 2) return out;

    auto qualifies = [&](std::int64_t t) {
        const std::int64_t v = nc_series[static_cast<std::size_t>(t)];
        if (t < 1 || v > threshold) return false;
        const std::int64_t lo = std::max<std::int64_t>(0, t - window);
        const std::int64_t hi = std::min<std::int64_t>(n - 1, t + window);
        for (std::int64_t u = lo; u <= hi; ++u)
            if (nc_series[static_cast<std::size_t>(u)] < v) return false;
        return true;
    };

    std::int64_t t = 1;
    while (t < n) {
        if (!qualifies(t)) {
            ++t;
            continue;
        }
        std::int64_t best = t;
        std::int64_t end = t;
        while (end + 1 < n && qualifies(end + 1)) {
            ++end;
            if (nc_series[static_cast<std::size_t>(end)] < nc_series[static_cast<std::size_t>(best)]) best = end;
        }
        out.push_back({best, static_cast<int>(best % 3), nc_series[static_cast<std::size_t>(best)]});
        t = end + 1;
    }
    // the terminal mirror is always an event
    if (nc_series[static_cast<std::size_t>(n - 1)] == 0 &&
        (out.empty() || out.back().t != n - 1)) {
        out.push_back({n - 1, static_cast<int>((n - 1) % 3), 0});
    }
    return out;
}

}  // namespace dcs
