// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line each. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "dcs/analysis.hpp"
#include "dcs/harness.hpp"
#include "dcs/render.hpp"
#include "oracles.hpp"

using namespace dcs;

#ifndef DCS_SOURCE_DIR
#define DCS_SOURCE_DIR "."
#endif

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string mask_path(const std::string& name) { return std::string(DCS_SOURCE_DIR) + "/masks/" + name; }

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

std::vector<SweepRow> returned_rows(const std::vector<SweepRow>& rows) {
    std::vector<SweepRow> out;
    for (const auto& r : rows)
        if (r.returned) out.push_back(r);
    return out;
}

RunSpec spec_30x30(std::uint64_t seed, const std::string& boundary) {
    RunSpec spec;
    spec.mask_id = "box_r2";
    spec.mask_text = read_file(mask_path("box_r2.mask"));
    spec.dims = {30, 30};
    spec.periodic = parse_boundary_flags(boundary, 2);
    spec.n_points = 8;
    spec.seed = seed;
    spec.max_steps = 100000;
    spec.record_g = true;
    return spec;
}

// ---------------------------------------------------------------------------

void criterion_1_reversibility() {
    Timer timer;
    SplitMix64 rng(2024);
    bool ok = true;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        const int rows = 2 + static_cast<int>(rng.next() % 19);
        const int cols = 2 + static_cast<int>(rng.next() % 19);
        std::string boundary;
        boundary += rng.next() % 4 ? 'P' : 'O';
        boundary += rng.next() % 4 ? 'P' : 'O';
        const int rank = 1 + static_cast<int>(rng.next() % 4);
        const Mask mask = oracles::box_mask(2, rank, rng.next() % 2 == 0);
        const Grid g = oracles::random_grid({rows, cols}, parse_boundary_flags(boundary, 2), rng);
        ok = ok && step_backward(step_forward(g, mask), mask) == g;
        ok = ok && step_forward(transliterate(step_forward(g, mask)), mask) == transliterate(g);
    }
    const double sec = timer.seconds();
    report(1, ok && sec < 10.0, "exact reversibility on 200 random (grid, mask) pairs",
           "bit-exact round trips and F(T(F(g)))=T(g); " + std::to_string(sec) + " s");
}

void criterion_2_bijection() {
    Timer timer;
    const Mask vn = Mask::parse(read_file(mask_path("von_neumann_r1.mask")));
    std::set<std::string> images;
    for (int code = 0; code < 81; ++code) {
        Grid g({2, 2});
        int rest = code;
        for (std::int64_t i = 0; i < 4; ++i) {
            g.set_cell(i, static_cast<Cell>(rest % 3));
            rest /= 3;
        }
        images.insert(step_forward(g, vn).to_text());
    }
    const double sec = timer.seconds();
    report(2, images.size() == 81 && sec < 1.0, "step_forward permutes all 81 states of the 2x2 torus",
           std::to_string(images.size()) + "/81 distinct images; " + std::to_string(sec) + " s");
}

void criterion_3_fast_path() {
    Timer timer;
    SplitMix64 rng(77);
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        const int d = trial % 5 == 4 ? 3 : 2;
        std::vector<int> dims;
        std::string boundary;
        for (int j = 0; j < d; ++j) {
            dims.push_back(d == 3 ? 3 + static_cast<int>(rng.next() % 5) : 3 + static_cast<int>(rng.next() % 14));
            boundary += rng.next() % 4 ? 'P' : 'O';
        }
        const int rank = 1 + static_cast<int>(rng.next() % (d == 3 ? 2 : 4));
        const Mask mask = oracles::box_mask(d, rank, rng.next() % 2 == 0);
        Grid slow = oracles::random_grid(dims, parse_boundary_flags(boundary, d), rng);
        Stepper fast(slow, mask);
        for (int step = 0; step < 50 && ok; ++step) {
            fast.step_forward();
            slow = naive::step_forward(slow, mask);
            ok = fast.grid() == slow;
        }
    }
    const double sec = timer.seconds();
    report(3, ok && sec < 30.0, "word-parallel engine matches the naive reference, 100 cases x 50 steps",
           std::string(ok ? "bit-exact" : "MISMATCH") + "; " + std::to_string(sec) + " s");
}

std::vector<SweepRow> criterion_4_recurrence() {
    Timer timer;
    SweepConfig config;
    config.mask_paths = {mask_path("box_r2.mask")};
    config.dims = {30, 30};
    config.periodic = {1, 1};
    config.n_points = 8;
    config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    config.max_steps = 100000;
    config.record_g = true;
    const auto rows = sweep(config, 8);
    const auto returned = returned_rows(rows);

    bool recur = true;
    const Mask mask = Mask::parse(read_file(mask_path("box_r2.mask")));
    for (const auto& r : returned) {
        const Grid start = random_initial({30, 30}, 8, r.seed);
        if (advance(start, mask, 2 * *r.t_half) != start) recur = false;
    }
    report(4, returned.size() >= 6 && recur,
           "recurrence on 30x30, 8 points, bundled rank-2 mask, seeds 1-10",
           std::to_string(returned.size()) + "/10 returned (need >= 6), s_{2 t_half} = s_0 " +
               (recur ? "bit-exact on all returned" : "VIOLATED") + "; " +
               std::to_string(timer.seconds()) + " s");
    return rows;
}

void criterion_5_filter_identities() {
    Timer timer;
    bool ok = true;
    SplitMix64 rng(88);
    for (int trial = 0; trial < 3; ++trial) {
        const auto boundary = trial == 1 ? "PO" : "PP";
        const Mask mask = oracles::box_mask(2, trial == 2 ? 2 : 1);
        const Grid start = random_initial({14, 13}, parse_boundary_flags(boundary, 2), 6, 100 + trial);
        Trajectory run(start, mask);
        for (int axis = 0; axis < 2 && ok; ++axis) {
            for (std::int64_t t : {2, 7, 19, 40}) {
                const auto b1 = b_filter(run, t, 1, axis);
                const auto s0 = b_filter(run, t - 1, 0, axis);
                const auto s1 = b_filter(run, t, 0, axis);
                const auto s2 = b_filter(run, t + 1, 0, axis);
                for (std::size_t i = 0; i < b1.values.size(); ++i)
                    if (b1.values[i] != s0.values[i] + s1.values[i] + s2.values[i]) ok = false;
            }
            for (int rep = 0; rep < 5; ++rep) {
                const std::int64_t t1 = static_cast<std::int64_t>(rng.next() % 40);
                const std::int64_t t2 = t1 + static_cast<std::int64_t>(rng.next() % 80);
                std::vector<int> acc(static_cast<std::size_t>(start.size()), 0);
                for (std::int64_t t = t1; t <= t2; ++t) {
                    const auto f = b_filter(run, t, 0, axis);
                    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += f.values[i];
                }
                for (int v : acc)
                    if (v < -1 || v > 1) ok = false;
            }
        }
    }
    report(5, ok, "exact B-filter identities on arbitrary runs",
           std::string("three-sum identity and interval sums in {-1,0,1}; ") +
               std::to_string(timer.seconds()) + " s");
}

void criterion_6_mirror_symmetries(const std::vector<SweepRow>& rows) {
    Timer timer;
    bool ok = true;
    int runs = 0;
    const Mask mask = Mask::parse(read_file(mask_path("box_r2.mask")));
    for (const auto& r : returned_rows(rows)) {
        ++runs;
        const std::int64_t tau = *r.t_half;
        Trajectory run(random_initial({30, 30}, 8, r.seed), mask);
        SplitMix64 rng(r.seed);
        std::vector<std::int64_t> samples{0, tau};
        while (samples.size() < 20) samples.push_back(static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(tau + 1)));
        std::sort(samples.begin(), samples.end());
        for (std::int64_t t : samples) {
            const auto af_t = a_filter(frame_window(run, t));
            const auto af_m = a_filter(frame_window(run, 2 * tau - t));
            if (af_t.values != af_m.values) ok = false;
            for (int i = 0; i < 3; ++i) {
                if (c_filter(run, t, i).values != c_filter(run, 2 * tau - t, i).values) ok = false;
                for (int axis = 0; axis < 2; ++axis) {
                    const auto b_t = b_filter(run, t, i, axis);
                    const auto b_m = b_filter(run, 2 * tau - t, i, axis);
                    for (std::size_t k = 0; k < b_t.values.size(); ++k)
                        if (b_t.values[k] != -b_m.values[k]) ok = false;
                }
            }
            if (t == 0 || t == tau)
                for (auto v : af_t.values)
                    if (v % 2 != 0) ok = false;
        }
        if (!ok) break;
    }
    report(6, ok && runs > 0, "mirror symmetries of A_F, B_F, C_F on every returned run of criterion 4",
           std::to_string(runs) + " runs x 20 sampled t, plus evenness at 0 and t_half; " +
               std::to_string(timer.seconds()) + " s");
}

void criterion_7_mcl(const std::vector<SweepRow>& rows2d, const std::vector<SweepRow>& rows3d) {
    Timer timer;
    bool ok = true;
    int checked = 0;
    auto check_rows = [&](const std::vector<SweepRow>& rows, const std::string& mask_file,
                          const std::vector<int>& dims, std::int64_t n_points) {
        const Mask mask = Mask::parse(read_file(mask_path(mask_file)));
        std::int64_t cells = 1;
        for (int e : dims) cells *= e;
        for (const auto& r : returned_rows(rows)) {
            ++checked;
            const Grid start = random_initial(dims, n_points, r.seed);
            const auto mcl = mcl_lambda(start, mask, *r.t_half);
            if (!mcl.all_equal || !mcl.divisible_by_4 || !mcl.lambda) {
                ok = false;
                continue;
            }
            const auto g = compute_g_series(start, mask, *r.t_half);
            const double s = main_integral(g, 0, *r.t_half, *r.t_half);
            if (s != static_cast<double>(4 * *mcl.lambda * cells)) ok = false;
            if (r.lambda != mcl.lambda) ok = false;
        }
    };
    check_rows(rows2d, "box_r2.mask", {30, 30}, 8);
    check_rows(rows3d, "cube18_r1.mask", {11, 11, 11}, 12);
    report(7, ok && checked > 0,
           "main conservation law on every returned run of criteria 4 and 9",
           std::to_string(checked) + " runs: per-cell sums equal, divisible by 4, S(0,t_half) = 4*lambda*N; " +
               std::to_string(timer.seconds()) + " s");
}

void criterion_8_open_boundary() {
    Timer timer;
    bool ok = true;
    int returned = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto [row, rec] = run_experiment(spec_30x30(seed, "PO"));
        if (!row.error.empty()) ok = false;
        if (!row.returned) continue;
        ++returned;
        if (!rec.mcl_all_equal || !rec.mcl_divisible_by_4 || !rec.lambda) ok = false;
        // cross-check via the independent integral route
        const Grid start = random_initial({30, 30}, parse_boundary_flags("PO", 2), 8, seed);
        const Mask mask = Mask::parse(read_file(mask_path("box_r2.mask")));
        const auto g = compute_g_series(start, mask, *row.t_half);
        if (main_integral(g, 0, *row.t_half, *row.t_half) != static_cast<double>(4 * *rec.lambda * 900))
            ok = false;
    }
    report(8, ok && returned >= 1, "conservation law survives one open axis (30x30, boundary PO)",
           std::to_string(returned) + "/10 returned, lambda constant per run; " +
               std::to_string(timer.seconds()) + " s");
}

std::vector<SweepRow> run_3d_sweep() {
    SweepConfig config;
    config.mask_paths = {mask_path("cube18_r1.mask")};
    config.dims = {11, 11, 11};
    config.periodic = {1, 1, 1};
    config.n_points = 12;
    for (std::uint64_t s = 1; s <= 20; ++s) config.seeds.push_back(s);
    config.max_steps = 100000;
    return sweep(config, 8);
}

void criterion_9_three_dimensions(const std::vector<SweepRow>& rows, double sweep_seconds) {
    Timer timer;
    const auto returned = returned_rows(rows);

    std::map<std::int64_t, int> lambda_hist;
    bool lambdas_ok = true;
    for (const auto& r : returned) {
        if (!r.lambda || *r.lambda <= 0 || *r.lambda > 50) {
            lambdas_ok = false;
            continue;
        }
        ++lambda_hist[*r.lambda];
    }
    std::int64_t mode = 0;
    int best = -1;
    std::ostringstream hist;
    for (const auto& [lam, count] : lambda_hist) {
        hist << " " << lam << ":" << count;
        if (count > best) {
            best = count;
            mode = lam;
        }
    }
    const bool pass = returned.size() * 2 >= 20 && lambdas_ok && mode <= 3;
    (void)timer;
    report(9, pass, "3d cube 11x11x11, 18-cell mask, 12 points, 20 seeds",
           std::to_string(returned.size()) + "/20 returned (need >= 10), lambda histogram{" + hist.str() +
               " }, mode " + std::to_string(mode) + " <= 3; " + std::to_string(sweep_seconds) + " s");
}

void criterion_10_symmetry_fit() {
    Timer timer;
    // exact synthetic recovery
    bool synth_ok = true;
    {
        const std::int64_t tau = 299;
        std::vector<double> s(static_cast<std::size_t>(tau) + 1);
        for (std::int64_t t = 0; t <= tau; ++t)
            s[static_cast<std::size_t>(t)] = 25.0 * std::sin(static_cast<double>(t) / 13.0) + 0.4 * static_cast<double>(t);
        MedianSeries med;
        med.t_begin = 2;
        const std::vector<std::int64_t> flips{101, 203};
        for (std::int64_t t = 2; t <= tau; ++t) {
            int seg = 0;
            for (auto f : flips) seg += t >= f;
            const int sigma = seg % 2 == 0 ? 1 : -1;
            const double offset = seg == 0 ? 4.0 : seg == 1 ? -9.0 : 17.0;
            med.m.push_back(offset + 0.5 * sigma * s[static_cast<std::size_t>(t)]);
            med.phase_id.push_back(seg % 3);
        }
        const auto fit = fit_symmetry(med, s, tau);
        synth_ok = std::abs(fit.k - 0.5) < 1e-9 && fit.residual < 1e-9;
    }

    // five returned 70x70 runs with the bundled ring mask
    int fitted = 0, passed = 0;
    std::ostringstream detail;
    RunSpec spec;
    spec.mask_id = "ring_r2";
    spec.mask_text = read_file(mask_path("ring_r2.mask"));
    spec.dims = {70, 70};
    spec.n_points = 8;
    spec.max_steps = 100000;
    spec.record_g = true;
    for (std::uint64_t seed = 1; seed <= 30 && fitted < 5; ++seed) {
        spec.seed = seed;
        const auto [row, rec] = run_experiment(spec);
        if (!rec.returned) continue;
        ++fitted;
        const auto med = median_series(phase_series(rec.nc_series));
        const auto s = s_series_from_g(rec.g_series, rec.t_half);
        const auto fit = fit_symmetry(med, s, *rec.t_half);
        if (fit.correlation_near_mirror >= 0.9) ++passed;
        detail << " " << std::round(fit.correlation_near_mirror * 1000) / 1000;
    }
    report(10, synth_ok && fitted == 5 && passed >= 3, "median symmetry: exact synthetic recovery and real-run fits",
           std::string("synthetic k=0.5 ") + (synth_ok ? "recovered" : "FAILED") + "; near-mirror correlations{" +
               detail.str() + " }, " + std::to_string(passed) + "/5 >= 0.9 (need >= 3); " +
               std::to_string(timer.seconds()) + " s");
}

void criterion_11_performance() {
    const Mask mask = Mask::parse(read_file(mask_path("box_r4.mask")));
    const Grid start = random_initial({70, 70}, 8, 42);
    Stepper st(start, mask);
    Timer timer;
    for (int step = 0; step < 100000; ++step) st.step_forward();
    const double sec = timer.seconds();
    const bool nonempty = st.nc() >= 0;
    report(11, sec <= 10.0 && nonempty, "70x70, rank-4 mask, 100000 forward steps single-threaded",
           std::to_string(sec) + " s (limit 10)");
}

void criterion_12_determinism() {
    Timer timer;
    SweepConfig config;
    config.mask_paths = {mask_path("box_r2.mask"), mask_path("ring_r2.mask")};
    config.dims = {16, 16};
    config.periodic = {1, 1};
    config.n_points = 5;
    config.seeds = {3, 1, 4, 15, 9};
    config.max_steps = 20000;
    const auto csv1 = sweep_csv(sweep(config, 1));
    const auto csv8 = sweep_csv(sweep(config, 8));
    const auto csv3 = sweep_csv(sweep(config, 3));
    report(12, csv1 == csv8 && csv1 == csv3, "sweep CSV bytes are independent of --jobs",
           "jobs 1 vs 3 vs 8 identical; " + std::to_string(timer.seconds()) + " s");
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1_reversibility();
    criterion_2_bijection();
    criterion_3_fast_path();
    const auto rows2d = criterion_4_recurrence();
    criterion_5_filter_identities();
    criterion_6_mirror_symmetries(rows2d);
    Timer sweep3d_timer;
    const auto rows3d = run_3d_sweep();
    const double sweep3d_seconds = sweep3d_timer.seconds();
    criterion_7_mcl(rows2d, rows3d);
    criterion_8_open_boundary();
    criterion_9_three_dimensions(rows3d, sweep3d_seconds);
    criterion_10_symmetry_fit();
    criterion_11_performance();
    criterion_12_determinism();
    std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
