#include "dcs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace dcs {

namespace {

// Rolling six-frame per-cell A-count fed one A-plane at a time. Ring slots
// start zeroed, so the first six pushes accumulate against empty planes.
class AfWindow {
public:
    AfWindow(int width, std::int64_t n_rows, std::int64_t n_cells)
        : width_(width), af_(static_cast<std::size_t>(n_cells), 0) {
        for (auto& p : ring_) p.resize(width, n_rows);
    }

    void push(const BitLattice& a_plane) {
        BitLattice& slot = ring_[static_cast<std::size_t>(pos_ % 6)];
        const int words = a_plane.words_per_row;
        std::int64_t cell = 0;
        for (std::int64_t r = 0; r < a_plane.n_rows; ++r) {
            const std::uint64_t* nw = a_plane.row(r);
            const std::uint64_t* ow = slot.row(r);
            for (int w = 0; w < words; ++w) {
                const int lo = w * 64;
                const int hi = std::min(width_, lo + 64);
                std::uint64_t nv = nw[w];
                std::uint64_t ov = ow[w];
                if (nv == ov) {
                    cell += hi - lo;
                    continue;
                }
                for (int k = lo; k < hi; ++k) {
                    af_[static_cast<std::size_t>(cell)] = static_cast<std::uint8_t>(
                        af_[static_cast<std::size_t>(cell)] + (nv & 1) - (ov & 1));
                    nv >>= 1;
                    ov >>= 1;
                    ++cell;
                }
            }
        }
        slot = a_plane;
        ++pos_;
    }

    const std::vector<std::uint8_t>& af() const { return af_; }

private:
    int width_;
    std::array<BitLattice, 6> ring_;
    std::vector<std::uint8_t> af_;
    std::int64_t pos_ = 0;
};

}  // namespace

ScanResult scan_run(const Grid& start, const Mask& mask, const ScanOptions& opt) {
    if (!opt.stop_at && opt.max_steps < 1) throw Error("max_steps must be >= 1");
    if (opt.stop_at && *opt.stop_at < 0) throw Error("stop_at must be >= 0");
    Stepper st(start, mask);
    const std::int64_t n = st.size();
    const int width = start.dims().back();
    const std::int64_t n_rows = n / width;

    ScanResult res;
    const bool need_af = opt.per_cell || opt.f_odd_census;
    AfWindow window(width, n_rows, n);
    if (need_af) res.acc.assign(static_cast<std::size_t>(n), 0);

    std::deque<std::int64_t> na_window;  // last six N_A values
    std::int64_t na_sum = 0;
    auto push_na = [&](std::int64_t na) {
        na_window.push_back(na);
        na_sum += na;
        if (na_window.size() > 6) {
            na_sum -= na_window.front();
            na_window.pop_front();
        }
    };

    std::deque<Grid> grid_ring;  // materialized frames, only while windows are wanted
    const bool want_windows = opt.window_horizon >= 0 && opt.window_cb != nullptr;

    BitLattice a_plane;
    auto feed_frame = [&]() {
        if (need_af) {
            st.write_a_plane(a_plane);
            window.push(a_plane);
        }
        push_na(st.na());
        if (want_windows) {
            grid_ring.push_back(st.grid());
            if (grid_ring.size() > 6) grid_ring.pop_front();
        }
    };

    // frames -2 and -1 exist by exact backward stepping
    st.step_backward();
    const Grid frame_m1 = st.grid();
    st.step_backward();
    feed_frame();  // -2
    st.load(frame_m1);
    feed_frame();  // -1
    st.load(start);
    feed_frame();  // 0
    res.nc_series.push_back(st.nc());

    const std::int64_t nc_cap = opt.stop_at ? *opt.stop_at : opt.max_steps;
    std::int64_t record_nc_until = nc_cap;
    std::int64_t stop_frame = opt.stop_at ? *opt.stop_at + 3 : opt.max_steps;
    bool mirror_found = false;

    auto emit = [&](std::int64_t t) {
        res.t_emit_end = t;
        if (opt.g_series) res.g_series.push_back(na_sum - 2 * n);
        if (need_af) {
            const auto& af = window.af();
            if (t == 0) res.af_first.assign(af.begin(), af.end());
            for (std::int64_t i = 0; i < n; ++i) res.acc[static_cast<std::size_t>(i)] += af[static_cast<std::size_t>(i)] - 2;
            if (opt.f_odd_census) {
                std::int64_t odd = 0;
                for (std::int64_t i = 0; i < n; ++i) {
                    const std::int64_t f2 = 2 * res.acc[static_cast<std::size_t>(i)] -
                                            (static_cast<std::int64_t>(res.af_first[static_cast<std::size_t>(i)]) - 2);
                    if (((f2 % 4) + 4) % 4 == 2) ++odd;
                }
                res.f_odd_counts.push_back(odd);
            }
        }
        if (want_windows && t <= opt.window_horizon) {
            FrameWindow w;
            w.center_gap = t;
            w.frames.assign(grid_ring.begin(), grid_ring.end());
            if (!opt.window_cb(t, w)) {
                res.aborted_early = true;
                return false;
            }
        }
        return true;
    };

    bool have_checksum = false;
    if (nc_cap == 0) {
        res.final_checksum = grid_checksum(start);
        have_checksum = true;
    }
    for (std::int64_t u = 1; u <= stop_frame; ++u) {
        st.step_forward();
        feed_frame();
        if (u <= record_nc_until) {
            res.nc_series.push_back(st.nc());
            if (opt.detect_mirror && !mirror_found && st.nc() == 0) {
                mirror_found = true;
                res.returned = true;
                res.t_half = u;
                stop_frame = u + 3;
                record_nc_until = u;
            }
        }
        const std::int64_t final_frame = mirror_found ? *res.t_half : nc_cap;
        if (u == final_frame) {
            res.final_checksum = grid_checksum(st.grid());
            have_checksum = true;
        }
        if (u >= 3 && !emit(u - 3)) break;
    }
    res.t_end = mirror_found ? *res.t_half : nc_cap;
    if (need_af) res.af_last = window.af();
    if (!have_checksum) res.final_checksum = grid_checksum(st.grid());
    return res;
}

MclResult mcl_lambda(const Grid& start, const Mask& mask, std::int64_t t_half) {
    if (t_half < 1) throw Error("MCL requires a closed run");
    ScanOptions opt;
    opt.stop_at = t_half;
    opt.detect_mirror = false;
    opt.per_cell = true;
    const ScanResult scan = scan_run(start, mask, opt);
    const std::int64_t n = static_cast<std::int64_t>(scan.acc.size());
    MclResult out;
    out.per_cell_sums.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t twice = 2 * scan.acc[static_cast<std::size_t>(i)] -
                                   (static_cast<std::int64_t>(scan.af_first[static_cast<std::size_t>(i)]) - 2) -
                                   (static_cast<std::int64_t>(scan.af_last[static_cast<std::size_t>(i)]) - 2);
        if (twice % 2 != 0) throw Error("MCL sum is not an integer; the start is not a mirror state");
        out.per_cell_sums[static_cast<std::size_t>(i)] = twice / 2;
    }
    out.all_equal = std::all_of(out.per_cell_sums.begin(), out.per_cell_sums.end(),
                                [&](std::int64_t v) { return v == out.per_cell_sums.front(); });
    const std::int64_t first = out.per_cell_sums.front();
    out.divisible_by_4 = ((first % 4) + 4) % 4 == 0;
    if (out.all_equal && out.divisible_by_4) out.lambda = first / 4;
    return out;
}

MclResult mcl_lambda(Trajectory& run, const RunOutcome& outcome) {
    if (!outcome.returned) throw Error("MCL requires a closed run");
    return mcl_lambda(run.start(), run.mask(), *outcome.t_half);
}

std::vector<std::int64_t> accumulate_F(const Grid& start, const Mask& mask, std::int64_t t) {
    if (t < 0) throw Error("accumulate_F needs t >= 0");
    ScanOptions opt;
    opt.stop_at = t;
    opt.detect_mirror = false;
    opt.per_cell = true;
    const ScanResult scan = scan_run(start, mask, opt);
    std::vector<std::int64_t> f(scan.acc.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::int64_t twice = 2 * scan.acc[i] - (static_cast<std::int64_t>(scan.af_first[i]) - 2);
        if (twice % 2 != 0) throw Error("F is not an integer; the start is not a mirror state");
        f[i] = twice / 2;
    }
    return f;
}

std::vector<std::int64_t> f_odd_census(const Grid& start, const Mask& mask, std::int64_t t_max) {
    ScanOptions opt;
    opt.stop_at = t_max;
    opt.detect_mirror = false;
    opt.per_cell = true;
    opt.f_odd_census = true;
    return scan_run(start, mask, opt).f_odd_counts;
}

std::vector<std::int64_t> compute_g_series(const Grid& start, const Mask& mask, std::int64_t t_max) {
    ScanOptions opt;
    opt.stop_at = t_max;
    opt.detect_mirror = false;
    opt.g_series = true;
    return scan_run(start, mask, opt).g_series;
}

double main_integral(std::span<const std::int64_t> g_series, std::int64_t t0, std::int64_t t,
                     std::optional<std::int64_t> t_half) {
    if (t0 > t) throw Error("main_integral needs t0 <= t");
    if (t0 < 0 || t >= static_cast<std::int64_t>(g_series.size()))
        throw Error("main_integral range outside the recorded series");
    double total = 0;
    for (std::int64_t q = t0; q <= t; ++q) total += static_cast<double>(g_series[static_cast<std::size_t>(q)]);
    if (t0 == 0) total -= static_cast<double>(g_series[0]) / 2.0;
    if (t_half && t == *t_half) total -= static_cast<double>(g_series[static_cast<std::size_t>(t)]) / 2.0;
    return total;
}

std::vector<double> s_series_from_g(std::span<const std::int64_t> g_series,
                                    std::optional<std::int64_t> t_half) {
    std::vector<double> s(g_series.size());
    double run = 0;
    for (std::size_t t = 0; t < g_series.size(); ++t) {
        double w = 1.0;
        if (t == 0) w = 0.5;
        if (t_half && static_cast<std::int64_t>(t) == *t_half) w = 0.5;
        run += w * static_cast<double>(g_series[t]);
        s[t] = run;
    }
    return s;
}

PhaseSeries phase_series(std::span<const std::int64_t> nc_series) {
    PhaseSeries ps;
    for (std::size_t t = 0; t < nc_series.size(); ++t) ps.phases[t % 3].push_back(nc_series[t]);
    return ps;
}

MedianSeries median_series(const PhaseSeries& ps, bool use_mean) {
    MedianSeries out;
    const std::int64_t total = static_cast<std::int64_t>(ps.phases[0].size() + ps.phases[1].size() + ps.phases[2].size());
    int prev_id = -1;
    double held_m = 0;
    int held_id = -1;
    for (std::int64_t t = 2; t < total; ++t) {
        // M updates once per 3-frame block (at t = 3k+2, when all three phases
        // have refreshed) and holds between updates; S is taken every frame.
        if (t % 3 == 2) {
            std::array<std::int64_t, 3> latest;
            for (int p = 0; p < 3; ++p)
                latest[static_cast<std::size_t>(p)] = ps.phases[static_cast<std::size_t>(p)][static_cast<std::size_t>((t - p) / 3)];
            std::array<int, 3> order{0, 1, 2};
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return latest[static_cast<std::size_t>(a)] < latest[static_cast<std::size_t>(b)];
            });
            const std::int64_t med = latest[static_cast<std::size_t>(order[1])];
            int id;
            if (prev_id >= 0 && latest[static_cast<std::size_t>(prev_id)] == med)
                id = prev_id;  // ties keep the previous phase
            else {
                id = order[1];
                for (int p = 0; p < 3; ++p)
                    if (latest[static_cast<std::size_t>(p)] == med) {
                        id = p;
                        break;
                    }
            }
            held_m = use_mean ? (static_cast<double>(latest[0]) + static_cast<double>(latest[1]) +
                                 static_cast<double>(latest[2])) /
                                    3.0
                              : static_cast<double>(med);
            held_id = id;
            prev_id = id;
        }
        out.m.push_back(held_m);
        out.phase_id.push_back(held_id);
    }
    return out;
}

SymmetryFit fit_symmetry(const MedianSeries& median, std::span<const double> s_series,
                         std::int64_t t_half) {
    const std::int64_t t_begin = median.t_begin;
    const std::int64_t med_end = t_begin + static_cast<std::int64_t>(median.m.size()) - 1;
    const std::int64_t t_end = std::min({t_half, med_end, static_cast<std::int64_t>(s_series.size()) - 1});
    if (t_end < t_begin + 1) throw Error("no signal to fit");
    {
        double lo = s_series[static_cast<std::size_t>(t_begin)], hi = lo;
        for (std::int64_t t = t_begin; t <= t_end; ++t) {
            lo = std::min(lo, s_series[static_cast<std::size_t>(t)]);
            hi = std::max(hi, s_series[static_cast<std::size_t>(t)]);
        }
        if (hi == lo) throw Error("no signal to fit");
    }

    // segment boundaries where the median phase changes
    std::vector<std::int64_t> flips;
    for (std::int64_t t = t_begin + 1; t <= t_end; ++t)
        if (median.phase_id[static_cast<std::size_t>(t - t_begin)] != median.phase_id[static_cast<std::size_t>(t - 1 - t_begin)])
            flips.push_back(t);

    // signs alternate walking backward from the mirror
    const std::int64_t n_segments = static_cast<std::int64_t>(flips.size()) + 1;
    std::vector<int> sign(static_cast<std::size_t>(n_segments));
    for (std::int64_t s = 0; s < n_segments; ++s)
        sign[static_cast<std::size_t>(s)] = ((n_segments - 1 - s) % 2 == 0) ? 1 : -1;  // last segment +1

    // h(t) = sigma_i * S(t); one k across all segments, offsets free per
    // segment (each segment's S graph is put onto the median, the paper's own
    // re-basing move), so k is the pooled within-segment slope.
    const std::int64_t n = t_end - t_begin + 1;
    std::vector<std::int64_t> seg_of(static_cast<std::size_t>(n));
    {
        std::int64_t seg = 0;
        for (std::int64_t t = t_begin; t <= t_end; ++t) {
            while (seg < static_cast<std::int64_t>(flips.size()) && t >= flips[static_cast<std::size_t>(seg)]) ++seg;
            seg_of[static_cast<std::size_t>(t - t_begin)] = seg;
        }
    }
    std::vector<double> h(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        h[static_cast<std::size_t>(i)] = sign[static_cast<std::size_t>(seg_of[static_cast<std::size_t>(i)])] *
                                         s_series[static_cast<std::size_t>(t_begin + i)];

    std::vector<double> mean_m(static_cast<std::size_t>(n_segments), 0.0);
    std::vector<double> mean_h(static_cast<std::size_t>(n_segments), 0.0);
    std::vector<std::int64_t> seg_n(static_cast<std::size_t>(n_segments), 0);
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(seg_of[static_cast<std::size_t>(i)]);
        mean_m[s] += median.m[static_cast<std::size_t>(i)];
        mean_h[s] += h[static_cast<std::size_t>(i)];
        ++seg_n[s];
    }
    for (std::int64_t s = 0; s < n_segments; ++s)
        if (seg_n[static_cast<std::size_t>(s)]) {
            mean_m[static_cast<std::size_t>(s)] /= static_cast<double>(seg_n[static_cast<std::size_t>(s)]);
            mean_h[static_cast<std::size_t>(s)] /= static_cast<double>(seg_n[static_cast<std::size_t>(s)]);
        }
    double num = 0, den = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(seg_of[static_cast<std::size_t>(i)]);
        const double dm = median.m[static_cast<std::size_t>(i)] - mean_m[s];
        const double dh = h[static_cast<std::size_t>(i)] - mean_h[s];
        num += dm * dh;
        den += dh * dh;
    }
    if (den == 0) throw Error("no signal to fit");
    double k = num / den;
    if (k < 0) {  // flip every sigma instead of carrying a negative slope
        k = -k;
        for (auto& s : sign) s = -s;
        for (std::int64_t i = 0; i < n; ++i) h[static_cast<std::size_t>(i)] = -h[static_cast<std::size_t>(i)];
        for (auto& mh : mean_h) mh = -mh;
    }

    SymmetryFit fit;
    fit.k = k;
    fit.t_begin = t_begin;
    fit.model.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(seg_of[static_cast<std::size_t>(i)]);
        const double offset = mean_m[s] - k * mean_h[s];
        fit.model[static_cast<std::size_t>(i)] = offset + k * h[static_cast<std::size_t>(i)];
    }

    {
        std::int64_t seg_start = t_begin;
        for (std::int64_t s = 0; s < n_segments; ++s) {
            FitSegment fs;
            fs.start_t = seg_start;
            fs.sign = sign[static_cast<std::size_t>(s)];
            fs.offset = mean_m[static_cast<std::size_t>(s)] - k * mean_h[static_cast<std::size_t>(s)];
            fit.segments.push_back(fs);
            if (s < static_cast<std::int64_t>(flips.size())) seg_start = flips[static_cast<std::size_t>(s)];
        }
    }

    auto pearson = [&](std::int64_t lo, std::int64_t hi) {
        const std::int64_t count = hi - lo + 1;
        double ma = 0, mb = 0;
        for (std::int64_t t = lo; t <= hi; ++t) {
            ma += median.m[static_cast<std::size_t>(t - t_begin)];
            mb += fit.model[static_cast<std::size_t>(t - t_begin)];
        }
        ma /= static_cast<double>(count);
        mb /= static_cast<double>(count);
        double saa = 0, sbb = 0, sab = 0;
        for (std::int64_t t = lo; t <= hi; ++t) {
            const double da = median.m[static_cast<std::size_t>(t - t_begin)] - ma;
            const double db = fit.model[static_cast<std::size_t>(t - t_begin)] - mb;
            saa += da * da;
            sbb += db * db;
            sab += da * db;
        }
        return (saa > 0 && sbb > 0) ? sab / std::sqrt(saa * sbb) : 0.0;
    };
    fit.correlation = pearson(t_begin, t_end);
    fit.correlation_near_mirror = pearson(std::max(t_begin, t_end / 2), t_end);

    double grand_mean = 0;
    for (std::int64_t i = 0; i < n; ++i) grand_mean += median.m[static_cast<std::size_t>(i)];
    grand_mean /= static_cast<double>(n);
    double sse = 0, var_m = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double r = median.m[static_cast<std::size_t>(i)] - fit.model[static_cast<std::size_t>(i)];
        sse += r * r;
        const double dm = median.m[static_cast<std::size_t>(i)] - grand_mean;
        var_m += dm * dm;
    }
    const double rmse = std::sqrt(sse / static_cast<double>(n));
    fit.residual = var_m > 0 ? rmse / std::sqrt(var_m / static_cast<double>(n)) : rmse;
    return fit;
}

}  // namespace dcs
