#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dcs/analysis.hpp"
#include "dcs/harness.hpp"
#include "dcs/render.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw dcs::Error("cannot read " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

std::vector<int> parse_size(const std::string& size) {
    std::vector<int> dims;
    std::size_t pos = 0;
    while (pos <= size.size()) {
        const std::size_t next = size.find('x', pos);
        const std::string tok = size.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        try {
            dims.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw dcs::Error("bad extent '" + tok + "' in --size");
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return dims;
}

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

int cmd_run(const std::string& mask_path, const std::string& size, int dims_declared,
            std::int64_t points, std::uint64_t seed, std::int64_t max_steps,
            const std::string& boundary, std::optional<std::int64_t> early_screen,
            const std::string& out) {
    dcs::RunSpec spec;
    spec.mask_id = stem_of(mask_path);
    spec.mask_text = read_file(mask_path);
    spec.dims = parse_size(size);
    if (dims_declared > 0 && dims_declared != static_cast<int>(spec.dims.size()))
        throw dcs::Error("--dims " + std::to_string(dims_declared) + " does not match --size " + size);
    spec.periodic = boundary.empty() ? std::vector<std::uint8_t>(spec.dims.size(), 1)
                                     : dcs::parse_boundary_flags(boundary, static_cast<int>(spec.dims.size()));
    spec.n_points = points;
    spec.seed = seed;
    spec.max_steps = max_steps;
    spec.early_screen = early_screen;
    spec.record_g = true;

    auto [row, record] = dcs::run_experiment(spec);
    if (!record.error.empty()) throw dcs::Error(record.error);
    record.save(out);
    std::cout << "run " << spec.mask_id << " seed " << seed << ": "
              << (record.returned ? "returned at t_half " + std::to_string(*record.t_half)
                                  : record.screened_out ? "screened out (no early superriver)"
                                                        : "did not return within " + std::to_string(max_steps))
              << (record.lambda ? ", lambda " + std::to_string(*record.lambda) : "") << "\n"
              << "record written to " << out << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, int jobs, const std::string& out) {
    const dcs::SweepConfig config = dcs::SweepConfig::load(config_path);
    const auto rows = dcs::sweep(config, jobs);
    dcs::write_sweep_outputs(rows, out);
    std::int64_t returned = 0;
    for (const auto& r : rows) returned += r.returned;
    std::cout << rows.size() << " runs, " << returned << " returned; results in " << out << "\n";
    return 0;
}

int cmd_analyze(const std::string& run_path, bool mcl, bool integral, bool symmetry, bool events,
                bool nullrivers, std::int64_t nullriver_t, const std::string& out_prefix) {
    dcs::RunRecord record = dcs::RunRecord::load(run_path);
    const std::string prefix = out_prefix.empty() ? run_path.substr(0, run_path.find_last_of('.')) : out_prefix;

    std::ostringstream report;
    report << "{\n";
    bool first_field = true;
    auto field = [&](const std::string& name, const std::string& value_json) {
        if (!first_field) report << ",\n";
        first_field = false;
        report << "  \"" << name << "\": " << value_json;
    };
    field("run", "\"" + run_path + "\"");
    field("returned", record.returned ? "true" : "false");
    if (record.t_half) field("t_half", std::to_string(*record.t_half));

    if (mcl) {
        if (!record.returned) throw dcs::Error("MCL requires a closed run");
        const auto res = dcs::mcl_lambda(record.initial_grid(), record.mask(), *record.t_half);
        field("mcl_all_equal", res.all_equal ? "true" : "false");
        field("mcl_divisible_by_4", res.divisible_by_4 ? "true" : "false");
        if (res.lambda) field("lambda", std::to_string(*res.lambda));
        field("per_cell_sum", std::to_string(res.per_cell_sums.front()));
    }

    std::vector<std::int64_t> g = record.g_series;
    if ((integral || symmetry) && g.empty()) {
        const std::int64_t t_max = record.returned ? *record.t_half
                                                   : std::max<std::int64_t>(0, static_cast<std::int64_t>(record.nc_series.size()) - 4);
        g = dcs::compute_g_series(record.initial_grid(), record.mask(), t_max);
    }
    if (integral) {
        const auto s = dcs::s_series_from_g(g, record.t_half);
        field("s_final", std::to_string(s.back()));
        if (record.returned && record.lambda) {
            std::int64_t cells = 1;
            for (int e : record.dims) cells *= e;
            field("s_equals_4_lambda_cells",
                  (s.back() == static_cast<double>(4 * *record.lambda * cells)) ? "true" : "false");
        }
    }

    const auto phases = dcs::phase_series(record.nc_series);
    const auto median = dcs::median_series(phases);

    if (symmetry) {
        if (!record.returned) throw dcs::Error("symmetry fit requires a closed run");
        const auto s = dcs::s_series_from_g(g, record.t_half);
        const auto fit = dcs::fit_symmetry(median, s, *record.t_half);
        field("k", std::to_string(fit.k));
        field("fit_residual", std::to_string(fit.residual));
        field("fit_correlation", std::to_string(fit.correlation));
        field("fit_correlation_near_mirror", std::to_string(fit.correlation_near_mirror));
        field("fit_segments", std::to_string(fit.segments.size()));
        // the two candidate M_0 readings next to the fitted offsets
        dcs::Trajectory run(record.initial_grid(), record.mask());
        const auto counts = dcs::count_states(run.frame(*record.t_half));
        field("na_at_half", std::to_string(counts.a));
        field("nb_at_half", std::to_string(counts.b));
        field("fitted_offset_last", std::to_string(fit.segments.back().offset));
    }

    if (events) {
        const auto evs = dcs::detect_local_reversals(record.nc_series);
        std::ostringstream ev;
        ev << "[";
        for (std::size_t i = 0; i < evs.size(); ++i) {
            if (i) ev << ", ";
            ev << "{\"t\": " << evs[i].t << ", \"phase\": " << evs[i].phase << ", \"nc\": " << evs[i].nc_value << "}";
        }
        ev << "]";
        field("events", ev.str());
    }

    if (nullrivers) {
        dcs::Trajectory run(record.initial_grid(), record.mask());
        const auto sightings = dcs::detect_nullrivers(run, nullriver_t);
        const dcs::Grid initial = record.initial_grid();
        const auto stats = dcs::nullriver_signature_scan(sightings, &initial);
        const std::string csv_path = prefix + ".nullrivers.csv";
        std::ofstream os(csv_path, std::ios::binary);
        os << dcs::signature_stats_csv(stats);
        field("nullriver_sightings", std::to_string(stats.n_sightings));
        field("nullriver_csv", "\"" + csv_path + "\"");
    }
    report << "\n}\n";

    // series CSV: t, phase0, phase1, phase2, M, phase_id, S
    {
        const std::string csv_path = prefix + ".series.csv";
        std::ofstream os(csv_path, std::ios::binary);
        if (!os) throw dcs::Error("cannot write " + csv_path);
        os << "t,phase0,phase1,phase2,M,phase_id,S\n";
        const auto s = g.empty() ? std::vector<double>{} : dcs::s_series_from_g(g, record.t_half);
        for (std::size_t t = 0; t < record.nc_series.size(); ++t) {
            os << t << ',';
            for (int p = 0; p < 3; ++p) {
                if (static_cast<int>(t % 3) == p) os << record.nc_series[t];
                os << ',';
            }
            const std::int64_t mt = static_cast<std::int64_t>(t) - median.t_begin;
            if (mt >= 0 && mt < static_cast<std::int64_t>(median.m.size()))
                os << median.m[static_cast<std::size_t>(mt)] << ',' << median.phase_id[static_cast<std::size_t>(mt)] << ',';
            else
                os << ",,";
            if (t < s.size()) os << s[t];
            os << '\n';
        }
    }

    const std::string json_path = prefix + ".analysis.json";
    std::ofstream os(json_path, std::ios::binary);
    if (!os) throw dcs::Error("cannot write " + json_path);
    os << report.str();
    std::cout << "analysis written to " << json_path << " (+ series CSV)\n";
    return 0;
}

int cmd_render(const std::string& run_path, std::int64_t t, const std::string& filters, int scale,
               const std::string& palette_path, const std::string& out) {
    const dcs::RunRecord record = dcs::RunRecord::load(run_path);
    dcs::Trajectory run(record.initial_grid(), record.mask());
    const dcs::Palette palette =
        palette_path.empty() ? dcs::Palette::defaults() : dcs::Palette::from_json_text(read_file(palette_path));
    dcs::NamedImages images;
    if (filters.empty()) {
        images = dcs::render_state(run.frame(t), palette, scale, out);
    } else {
        images = dcs::render_filters(run, t, dcs::parse_filter_selection(filters), palette, scale, out);
    }
    for (const auto& [path, img] : images) dcs::write_ppm(path, img);
    std::cout << images.size() << (images.size() == 1 ? " image" : " images") << " written\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dcs - a three-state reversible cellular automaton laboratory"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run one seeded soliton to its mirror point");
    std::string run_mask, run_size = "70x70", run_boundary, run_out = "run.json";
    int run_dims = 0;
    std::int64_t run_points = 8, run_max_steps = 100000;
    std::uint64_t run_seed = 0;
    std::optional<std::int64_t> run_screen;
    run->add_option("--mask", run_mask, "Mask file")->required();
    run->add_option("--size", run_size, "Extents, e.g. 70x70 or 11x11x11");
    run->add_option("--dims", run_dims, "Dimension count (checked against --size)");
    run->add_option("--points", run_points, "Number of initial B cells");
    run->add_option("--seed", run_seed, "PRNG seed");
    run->add_option("--max-steps", run_max_steps, "Step cap");
    run->add_option("--boundary", run_boundary, "Per-axis P/O flags, e.g. PP or PO");
    run->add_option("--early-screen", run_screen, "Abort if no superriver by this step");
    run->add_option("--out", run_out, "Run record path");

    auto* sweep = app.add_subcommand("sweep", "Run a mask x seed cross product");
    std::string sweep_config, sweep_out = "sweep.csv";
    int sweep_jobs = 1;
    sweep->add_option("--config", sweep_config, "Sweep config JSON")->required();
    sweep->add_option("--jobs", sweep_jobs, "Worker threads");
    sweep->add_option("--out", sweep_out, "Results CSV path");

    auto* analyze = app.add_subcommand("analyze", "Analyze a recorded run");
    std::string an_run, an_out;
    bool an_mcl = false, an_integral = false, an_symmetry = false, an_events = false, an_null = false;
    std::int64_t an_null_t = 50;
    analyze->add_option("--run", an_run, "Run record JSON")->required();
    analyze->add_flag("--mcl", an_mcl, "Main conservation law and lambda");
    analyze->add_flag("--integral", an_integral, "Main integral S");
    analyze->add_flag("--symmetry", an_symmetry, "Median symmetry fit");
    analyze->add_flag("--events", an_events, "Local time-reversal events");
    analyze->add_flag("--nullrivers", an_null, "NullRiver sightings and signature table");
    analyze->add_option("--nullriver-t", an_null_t, "Window center for the NullRiver scan");
    analyze->add_option("--out", an_out, "Output prefix (default: run path without extension)");

    auto* render = app.add_subcommand("render", "Render a frame or filter overlay to PPM");
    std::string rd_run, rd_filters, rd_palette, rd_out = "frame.ppm";
    std::int64_t rd_t = 0;
    int rd_scale = 8;
    render->add_option("--run", rd_run, "Run record JSON")->required();
    render->add_option("--t", rd_t, "Frame time (window drawn between t and t+1)");
    render->add_option("--filters", rd_filters, "Comma list of a,b0..b2,c0..c2; empty renders states");
    render->add_option("--scale", rd_scale, "Pixels per cell");
    render->add_option("--palette", rd_palette, "Palette override JSON");
    render->add_option("--out", rd_out, "Output path (3D runs write one sheet per slice)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed())
            return cmd_run(run_mask, run_size, run_dims, run_points, run_seed, run_max_steps,
                           run_boundary, run_screen, run_out);
        if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_jobs, sweep_out);
        if (analyze->parsed())
            return cmd_analyze(an_run, an_mcl, an_integral, an_symmetry, an_events, an_null, an_null_t, an_out);
        if (render->parsed()) return cmd_render(rd_run, rd_t, rd_filters, rd_scale, rd_palette, rd_out);
    } catch (const dcs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
