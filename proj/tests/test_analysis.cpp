#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dcs/analysis.hpp"
#include "dcs/seeding.hpp"
#include "oracles.hpp"

using namespace dcs;

namespace {

Grid anchor_start() {
    Grid g({12, 12});
    for (const auto& v : {std::vector<int>{2, 3}, {7, 7}, {5, 10}, {9, 1}}) g.set(v, Cell::B);
    return g;
}

}  // namespace

TEST_CASE("phase_series splits by residue") {
    const std::vector<std::int64_t> nc{0, 5, 7, 1, 6, 8};
    const auto ps = phase_series(nc);
    CHECK(ps.phases[0] == std::vector<std::int64_t>{0, 1});
    CHECK(ps.phases[1] == std::vector<std::int64_t>{5, 6});
    CHECK(ps.phases[2] == std::vector<std::int64_t>{7, 8});

    const auto flat = phase_series(std::vector<std::int64_t>(9, 4));
    for (int p = 0; p < 3; ++p) CHECK(flat.phases[static_cast<std::size_t>(p)] == std::vector<std::int64_t>{4, 4, 4});
}

TEST_CASE("median series picks the middle order statistic per block") {
    const auto ps = phase_series(std::vector<std::int64_t>{10, 20, 30, 10, 20, 30});
    const auto med = median_series(ps);
    REQUIRE(med.m.size() == 4);  // t = 2..5
    CHECK(med.t_begin == 2);
    CHECK(med.m[0] == 20.0);
    CHECK(med.phase_id[0] == 1);
    // values hold between block completions
    CHECK(med.m[1] == 20.0);
    CHECK(med.m[2] == 20.0);
    CHECK(med.m[3] == 20.0);  // block at t=5: (10,20,30) again

    // permutation of the roles moves the id but not the value
    const auto ps2 = phase_series(std::vector<std::int64_t>{30, 10, 20});
    const auto med2 = median_series(ps2);
    CHECK(med2.m[0] == 20.0);
    CHECK(med2.phase_id[0] == 2);

    // ties keep the previous phase id
    const auto ps3 = phase_series(std::vector<std::int64_t>{10, 20, 30, 10, 30, 20});
    const auto med3 = median_series(ps3);
    // first block median 20 (phase 1); second block (10,30,20): median 20 now
    // held by phase 2
    CHECK(med3.phase_id[0] == 1);
    CHECK(med3.m[3] == 20.0);
    CHECK(med3.phase_id[3] == 2);

    const auto ps4 = phase_series(std::vector<std::int64_t>{10, 20, 20, 10, 20, 20});
    const auto med4 = median_series(ps4);
    CHECK(med4.phase_id[0] == 1);
    CHECK(med4.phase_id[3] == 1);  // tie between phases 1 and 2 keeps 1

    const auto mean_med = median_series(ps, true);
    CHECK(mean_med.m[0] == doctest::Approx(20.0));
}

TEST_CASE("mcl on the frozen anchor run") {
    const Mask mask = oracles::box_mask(2, 1);
    const Grid start = anchor_start();
    const auto out = run_to_mirror(start, mask, 5000);
    REQUIRE(out.returned);
    REQUIRE(out.t_half == 349);

    const auto mcl = mcl_lambda(start, mask, *out.t_half);
    CHECK(mcl.all_equal);
    CHECK(mcl.divisible_by_4);
    REQUIRE(mcl.lambda.has_value());
    CHECK(*mcl.lambda == 7);
    CHECK(mcl.per_cell_sums.front() == 28);
    CHECK(mcl.per_cell_sums.size() == 144);

    // independent route: the sum reduces to 6*(A-occupancy over 1..tau) - 2*tau
    Trajectory run(start, mask);
    std::vector<std::int64_t> occupancy(static_cast<std::size_t>(start.size()), 0);
    for (std::int64_t u = 1; u <= *out.t_half; ++u) {
        const Grid f = run.frame(u);
        for (std::int64_t i = 0; i < f.size(); ++i)
            occupancy[static_cast<std::size_t>(i)] += f.cell(i) == Cell::A;
    }
    for (std::size_t i = 0; i < occupancy.size(); ++i)
        CHECK(mcl.per_cell_sums[i] == 6 * occupancy[i] - 2 * *out.t_half);
}

TEST_CASE("mcl demands a closed run") {
    const Mask mask = oracles::box_mask(2, 1);
    Trajectory run(anchor_start(), mask);
    RunOutcome not_returned;
    CHECK_THROWS_WITH_AS(mcl_lambda(run, not_returned), doctest::Contains("closed run"), Error);
    CHECK_THROWS_AS(mcl_lambda(anchor_start(), mask, 0), Error);
}

TEST_CASE("the all-A run has t_half 1 and lambda 1") {
    // A_F is 6 everywhere on a static run, so each cell sums to
    // (6-2)/2 + (6-2)/2 = 4 and lambda is 1
    const Mask mask = oracles::box_mask(2, 1);
    const Grid start({6, 6});
    const auto out = run_to_mirror(start, mask, 10);
    REQUIRE(out.returned);
    CHECK(*out.t_half == 1);
    const auto mcl = mcl_lambda(start, mask, 1);
    CHECK(mcl.all_equal);
    CHECK(mcl.per_cell_sums.front() == 4);
    CHECK(*mcl.lambda == 1);
}

TEST_CASE("3d anchor run keeps the conservation law") {
    const Mask cube18 = Mask::parse(
        "DIM 3\nRANK 1\n010\n111\n010\n\n111\n101\n111\n\n010\n111\n010\n");
    Grid start({7, 7, 7});
    for (const auto& v : {std::vector<int>{1, 2, 3}, {4, 5, 6}, {3, 3, 0}}) start.set(v, Cell::B);
    const auto out = run_to_mirror(start, cube18, 3000);
    REQUIRE(out.returned);
    CHECK(*out.t_half == 23);
    const auto mcl = mcl_lambda(start, cube18, *out.t_half);
    CHECK(mcl.all_equal);
    CHECK(mcl.divisible_by_4);
    CHECK(*mcl.lambda == 2);
}

TEST_CASE("accumulate_F is integral and consistent with the conservation sum") {
    const Mask mask = oracles::box_mask(2, 1);
    const Grid start = anchor_start();
    Trajectory run(start, mask);
    const std::int64_t tau = 349;

    const auto f0 = accumulate_F(start, mask, 0);
    const auto af0 = a_filter(frame_window(run, 0));
    for (std::size_t i = 0; i < f0.size(); ++i) {
        CHECK(2 * f0[i] == static_cast<std::int64_t>(af0.values[i]) - 2);  // F(0) = (A_F(0)-2)/2
    }

    const auto f_tau = accumulate_F(start, mask, tau);
    const auto af_tau = a_filter(frame_window(run, tau));
    const auto mcl = mcl_lambda(start, mask, tau);
    for (std::size_t i = 0; i < f_tau.size(); ++i) {
        const std::int64_t final_half_term = (static_cast<std::int64_t>(af_tau.values[i]) - 2) / 2;
        CHECK(f_tau[i] - final_half_term == mcl.per_cell_sums[i]);
    }

    const auto census = f_odd_census(start, mask, 60);
    CHECK(census.size() == 61);
    for (auto odd : census) {
        CHECK(odd >= 0);
        CHECK(odd <= start.size());
    }
    // spot check one t against a direct parity count
    const auto f9 = accumulate_F(start, mask, 9);
    std::int64_t odd9 = 0;
    for (auto v : f9) odd9 += ((v % 2) + 2) % 2;
    CHECK(census[9] == odd9);
}

TEST_CASE("main integral: endpoints, additivity and the lambda identity") {
    const Mask mask = oracles::box_mask(2, 1);
    const Grid start = anchor_start();
    const std::int64_t tau = 349;
    const auto g = compute_g_series(start, mask, tau);
    REQUIRE(static_cast<std::int64_t>(g.size()) == tau + 1);

    // S(0, tau) = 4 * lambda * N
    CHECK(main_integral(g, 0, tau, tau) == 4.0 * 7 * 144);

    // an empty range is the single (half-weighted) frame
    CHECK(main_integral(g, 0, 0, tau) == static_cast<double>(g[0]) / 2);
    CHECK(main_integral(g, 5, 5, tau) == static_cast<double>(g[5]));
    CHECK(main_integral(g, tau, tau, tau) == static_cast<double>(g.back()) / 2);

    // additivity over interior splits
    SplitMix64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const std::int64_t t0 = 1 + static_cast<std::int64_t>(rng.next() % 100);
        const std::int64_t t2 = t0 + 2 + static_cast<std::int64_t>(rng.next() % 200);
        const std::int64_t t1 = t0 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(t2 - t0));
        CHECK(main_integral(g, t0, t1) + main_integral(g, t1 + 1, t2) ==
              doctest::Approx(main_integral(g, t0, t2)));
    }
    CHECK_THROWS_AS(main_integral(g, 5, 4), Error);
    CHECK_THROWS_AS(main_integral(g, 0, tau + 1, tau), Error);

    // the cumulative series agrees with the integral at every prefix
    const auto s = s_series_from_g(g, tau);
    for (std::int64_t t : {std::int64_t{0}, std::int64_t{1}, tau / 2, tau})
        CHECK(s[static_cast<std::size_t>(t)] == doctest::Approx(main_integral(g, 0, t, tau)));

    // g itself matches a windowed recomputation at sampled times
    Trajectory run(start, mask);
    for (std::int64_t t : {std::int64_t{0}, std::int64_t{3}, std::int64_t{57}}) {
        const auto af = a_filter(frame_window(run, t));
        std::int64_t direct = 0;
        for (auto v : af.values) direct += static_cast<std::int64_t>(v) - 2;
        CHECK(g[static_cast<std::size_t>(t)] == direct);
    }
}

TEST_CASE("symmetry fit recovers an exact piecewise model") {
    // S: a deterministic wiggle; sigma flips at two chosen block boundaries
    const std::int64_t tau = 299;
    std::vector<double> s(static_cast<std::size_t>(tau) + 1);
    for (std::int64_t t = 0; t <= tau; ++t)
        s[static_cast<std::size_t>(t)] = 40.0 * std::sin(static_cast<double>(t) / 17.0) + 0.3 * static_cast<double>(t);

    MedianSeries med;
    med.t_begin = 2;
    const std::vector<std::int64_t> flips{101, 203};  // block-aligned: 101 = 3*33+2, 203 = 3*67+2
    const double k_true = 0.5;
    for (std::int64_t t = 2; t <= tau; ++t) {
        int seg = 0;
        for (auto f : flips) seg += t >= f;
        const int sigma = (2 - seg) % 2 == 0 ? 1 : -1;  // alternates; +1 on the last segment
        const double offset = seg == 0 ? 12.0 : seg == 1 ? -7.0 : 31.0;
        med.m.push_back(offset + k_true * sigma * s[static_cast<std::size_t>(t)]);
        med.phase_id.push_back(seg % 3);
    }
    const auto fit = fit_symmetry(med, s, tau);
    CHECK(fit.k == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit.residual < 1e-9);
    CHECK(fit.correlation == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(fit.segments.size() == 3);
    CHECK(fit.segments[0].start_t == 2);
    CHECK(fit.segments[1].start_t == 101);
    CHECK(fit.segments[2].start_t == 203);
    CHECK(fit.segments[0].sign == fit.segments[2].sign);
    CHECK(fit.segments[0].sign == -fit.segments[1].sign);
    CHECK(fit.segments[0].offset == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(fit.segments[2].offset == doctest::Approx(31.0).epsilon(1e-9));
}

TEST_CASE("symmetry fit rejects a flat integral") {
    MedianSeries med;
    med.t_begin = 2;
    for (std::int64_t t = 2; t <= 50; ++t) {
        med.m.push_back(5.0);
        med.phase_id.push_back(0);
    }
    const std::vector<double> s(51, 3.0);
    CHECK_THROWS_WITH_AS(fit_symmetry(med, s, 50), doctest::Contains("no signal"), Error);
}

TEST_CASE("scan_run emissions line up with direct filter computation") {
    const Mask mask = oracles::box_mask(2, 2);
    const Grid start = random_initial({8, 8}, 4, 9);
    ScanOptions opt;
    opt.stop_at = 12;
    opt.detect_mirror = false;
    opt.per_cell = true;
    opt.g_series = true;
    const auto scan = scan_run(start, mask, opt);
    CHECK(scan.t_emit_end == 12);
    CHECK(scan.g_series.size() == 13);
    CHECK(scan.nc_series.size() == 13);

    Trajectory run(start, mask);
    const auto af0 = a_filter(frame_window(run, 0));
    const auto af12 = a_filter(frame_window(run, 12));
    for (std::size_t i = 0; i < scan.af_first.size(); ++i) {
        CHECK(scan.af_first[i] == af0.values[i]);
        CHECK(scan.af_last[i] == af12.values[i]);
    }
    std::int64_t acc0 = 0;
    for (std::int64_t t = 0; t <= 12; ++t) {
        const auto af = a_filter(frame_window(run, t));
        std::int64_t direct = 0;
        for (auto v : af.values) direct += static_cast<std::int64_t>(v) - 2;
        CHECK(scan.g_series[static_cast<std::size_t>(t)] == direct);
        acc0 += static_cast<std::int64_t>(af.values[0]) - 2;
    }
    CHECK(scan.acc[0] == acc0);
}
