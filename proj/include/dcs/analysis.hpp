#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dcs/structures.hpp"
#include "dcs/trajectory.hpp"

namespace dcs {

// Single-pass run scanner. Steps the automaton once (priming two frames
// backward so windows exist from t = 0) and streams the six-frame A-count
// A_F(t); everything downstream (N_C phases, the conservation law, the main
// integral) is accumulated on the fly. A_F(t) becomes available once frame
// t+3 has been stepped, so emissions trail the frame cursor by three.
struct ScanOptions {
    std::int64_t max_steps = 100000;
    std::optional<std::int64_t> stop_at;  // scan to a fixed time instead of the mirror
    bool detect_mirror = true;
    bool per_cell = false;      // per-cell running sums of (A_F - 2)
    bool g_series = false;      // per-frame all-cells sums of (A_F - 2)
    bool f_odd_census = false;  // per-t count of odd F(t,v) cells
    std::int64_t window_horizon = -1;
    std::function<bool(std::int64_t t, const FrameWindow&)> window_cb;  // false aborts the scan
};

struct ScanResult {
    bool returned = false;
    std::optional<std::int64_t> t_half;
    std::vector<std::int64_t> nc_series;  // frames 0..t_end
    std::vector<std::int64_t> g_series;   // t = 0..t_emit_end
    std::vector<std::int64_t> acc;        // per cell, full-weight sums over emitted t
    std::vector<std::uint8_t> af_first;   // A_F(0)
    std::vector<std::uint8_t> af_last;    // A_F(t_emit_end)
    std::vector<std::int64_t> f_odd_counts;
    std::int64_t t_end = 0;
    std::int64_t t_emit_end = -1;
    bool aborted_early = false;
    std::uint64_t final_checksum = 0;
};

ScanResult scan_run(const Grid& start, const Mask& mask, const ScanOptions& options);

struct MclResult {
    std::optional<std::int64_t> lambda;
    std::vector<std::int64_t> per_cell_sums;
    bool all_equal = false;
    bool divisible_by_4 = false;
};

/// Per-cell half-weighted time sum of (A_F - 2) over 0..t_half. On every
/// closed run observed so far the sums agree across all cells and are a
/// multiple of 4; lambda is that quarter when they do.
MclResult mcl_lambda(const Grid& start, const Mask& mask, std::int64_t t_half);
MclResult mcl_lambda(Trajectory& run, const RunOutcome& outcome);

/// F(t,v): the same per-cell sum truncated at t (half weight only at 0).
std::vector<std::int64_t> accumulate_F(const Grid& start, const Mask& mask, std::int64_t t);

/// Count of cells with odd F(t,v), for t = 0..t_max.
std::vector<std::int64_t> f_odd_census(const Grid& start, const Mask& mask, std::int64_t t_max);

/// Per-frame all-cells sums of (A_F - 2) for t = 0..t_max.
std::vector<std::int64_t> compute_g_series(const Grid& start, const Mask& mask, std::int64_t t_max);

/// S(t0, t): sum of g over the range, half-weighted at q = 0 and q = t_half
/// when those are endpoints.
double main_integral(std::span<const std::int64_t> g_series, std::int64_t t0, std::int64_t t,
                     std::optional<std::int64_t> t_half = std::nullopt);

/// Cumulative S(0, t) for every t, as used by the symmetry fit.
std::vector<double> s_series_from_g(std::span<const std::int64_t> g_series,
                                    std::optional<std::int64_t> t_half = std::nullopt);

struct PhaseSeries {
    std::array<std::vector<std::int64_t>, 3> phases;  // phases[p][k] = nc at t = 3k+p
};

PhaseSeries phase_series(std::span<const std::int64_t> nc_series);

struct MedianSeries {
    std::int64_t t_begin = 2;        // first t with all three phases populated
    std::vector<double> m;           // middle order statistic of the three latest phase values
    std::vector<int> phase_id;       // residue supplying the median; ties keep the previous id
};

MedianSeries median_series(const PhaseSeries& ps, bool use_mean = false);

struct FitSegment {
    std::int64_t start_t = 0;
    int sign = 1;
    double offset = 0;
};

struct SymmetryFit {
    double k = 0;  // positive by construction
    double residual = 0;              // RMSE normalized by std(M)
    double correlation = 0;           // Pearson(M, model) over the fit range
    double correlation_near_mirror = 0;  // same over [t_half/2, t_half]
    std::vector<FitSegment> segments;    // forward order
    std::int64_t t_begin = 2;
    std::vector<double> model;           // fitted values for t_begin..t_half
};

/// Piecewise model M(t) ~ c_i + k*sigma_i*S(t): sigma flips at every median
/// phase change, offsets chain so the model is continuous at flips, and a
/// single (c, k) is fit by least squares over the whole range.
SymmetryFit fit_symmetry(const MedianSeries& median, std::span<const double> s_series,
                         std::int64_t t_half);

}  // namespace dcs
