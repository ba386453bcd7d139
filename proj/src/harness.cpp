#include "dcs/harness.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace dcs {

namespace {

std::string fnv_digest(std::span<const std::int64_t> values) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int64_t v : values) {
        for (int s = 0; s < 64; s += 8) {
            h ^= (static_cast<std::uint64_t>(v) >> s) & 0xff;
            h *= 0x100000001b3ULL;
        }
    }
    std::ostringstream os;
    os << "fnv1a:" << std::hex << h;
    return os.str();
}

std::string hex_checksum(std::uint64_t v) {
    std::ostringstream os;
    os << "fnv1a:" << std::hex << v;
    return os.str();
}

std::string dims_string(const std::vector<int>& dims) {
    std::string s;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (j) s += 'x';
        s += std::to_string(dims[j]);
    }
    return s;
}

}  // namespace

Grid RunRecord::initial_grid() const { return Grid::from_rows(dims, format_boundary_flags(periodic), initial_rows); }

std::pair<SweepRow, RunRecord> run_experiment(const RunSpec& spec) {
    SweepRow row;
    row.mask_id = spec.mask_id;
    row.seed = spec.seed;
    row.dims_str = dims_string(spec.dims);
    row.n_points = spec.n_points;

    RunRecord rec;
    rec.mask_id = spec.mask_id;
    rec.mask_text = spec.mask_text;
    rec.dims = spec.dims;
    rec.periodic = spec.periodic;
    rec.n_points = spec.n_points;
    rec.seed = spec.seed;
    rec.max_steps = spec.max_steps;

    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Mask mask = spec.mask();
        const auto periodic = spec.periodic.empty()
                                  ? std::vector<std::uint8_t>(spec.dims.size(), std::uint8_t{1})
                                  : spec.periodic;
        rec.periodic = periodic;
        const Grid start = random_initial(spec.dims, periodic, spec.n_points, spec.seed);
        rec.initial_rows = start.to_rows();

        bool wrap_seen = false;
        ScanOptions opt;
        opt.max_steps = spec.max_steps;
        opt.per_cell = spec.analyze_mcl;
        opt.g_series = spec.record_g;
        opt.window_horizon = spec.superriver_horizon;
        opt.window_cb = [&](std::int64_t t, const FrameWindow& w) {
            if (!wrap_seen) wrap_seen = window_has_wrapping_river(w);
            if (spec.early_screen && t >= *spec.early_screen && !wrap_seen) return false;
            return true;
        };

        const ScanResult scan = scan_run(start, mask, opt);
        rec.returned = scan.returned;
        rec.t_half = scan.t_half;
        rec.nc_series = scan.nc_series;
        rec.g_series = scan.g_series;
        rec.superriver_early = wrap_seen;
        rec.screened_out = scan.aborted_early;
        rec.final_checksum = hex_checksum(scan.final_checksum);

        if (spec.analyze_mcl && scan.returned) {
            const std::int64_t n = static_cast<std::int64_t>(scan.acc.size());
            std::vector<std::int64_t> sums(static_cast<std::size_t>(n));
            bool integral_ok = true;
            for (std::int64_t i = 0; i < n; ++i) {
                const std::int64_t twice = 2 * scan.acc[static_cast<std::size_t>(i)] -
                                           (static_cast<std::int64_t>(scan.af_first[static_cast<std::size_t>(i)]) - 2) -
                                           (static_cast<std::int64_t>(scan.af_last[static_cast<std::size_t>(i)]) - 2);
                if (twice % 2 != 0) {
                    integral_ok = false;
                    break;
                }
                sums[static_cast<std::size_t>(i)] = twice / 2;
            }
            if (integral_ok) {
                rec.mcl_all_equal = std::all_of(sums.begin(), sums.end(), [&](std::int64_t v) { return v == sums.front(); });
                rec.mcl_divisible_by_4 = ((sums.front() % 4) + 4) % 4 == 0;
                rec.per_cell_digest = fnv_digest(sums);
                if (rec.mcl_all_equal && rec.mcl_divisible_by_4) rec.lambda = sums.front() / 4;
            } else {
                rec.error = "MCL sums are not integers";
            }
        }
        if (spec.analyze_events) {
            rec.events = detect_local_reversals(rec.nc_series, spec.reversal_threshold, spec.reversal_window);
            row.local_reversal_count = static_cast<std::int64_t>(rec.events.size());
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    row.returned = rec.returned;
    row.t_half = rec.t_half;
    row.lambda = rec.lambda;
    row.superriver_early = rec.superriver_early;
    row.wall_ms = rec.wall_ms;
    row.error = rec.error;
    return {row, rec};
}

namespace {

using nlohmann::json;

json events_to_json(const std::vector<LocalReversalEvent>& events) {
    json arr = json::array();
    for (const auto& e : events) arr.push_back({{"t", e.t}, {"phase", e.phase}, {"nc", e.nc_value}});
    return arr;
}

}  // namespace

std::string RunRecord::to_json_text() const {
    json j;
    j["format"] = "dcs-run/1";
    j["mask_id"] = mask_id;
    j["mask"] = mask_text;
    j["dims"] = dims;
    j["boundary"] = format_boundary_flags(periodic);
    j["n_points"] = n_points;
    j["seed"] = seed;
    j["max_steps"] = max_steps;
    j["initial"] = initial_rows;
    j["returned"] = returned;
    if (t_half) j["t_half"] = *t_half;
    j["nc_series"] = nc_series;
    if (!g_series.empty()) j["g_series"] = g_series;
    if (lambda) j["lambda"] = *lambda;
    j["mcl_all_equal"] = mcl_all_equal;
    j["mcl_divisible_by_4"] = mcl_divisible_by_4;
    if (!per_cell_digest.empty()) j["per_cell_digest"] = per_cell_digest;
    j["final_checksum"] = final_checksum;
    j["events"] = events_to_json(events);
    if (superriver_early) j["superriver_early"] = *superriver_early;
    j["screened_out"] = screened_out;
    if (!error.empty()) j["error"] = error;
    j["meta"] = {{"wall_ms", wall_ms}};  // excluded from the determinism contract
    return j.dump(1);
}

RunRecord RunRecord::from_json_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("run record is not valid JSON: ") + e.what());
    }
    if (j.value("format", "") != "dcs-run/1") throw Error("unknown run record format");
    RunRecord r;
    r.mask_id = j.value("mask_id", "");
    r.mask_text = j.at("mask").get<std::string>();
    r.dims = j.at("dims").get<std::vector<int>>();
    r.periodic = parse_boundary_flags(j.at("boundary").get<std::string>(), static_cast<int>(r.dims.size()));
    r.n_points = j.value("n_points", std::int64_t{0});
    r.seed = j.value("seed", std::uint64_t{0});
    r.max_steps = j.value("max_steps", std::int64_t{0});
    r.initial_rows = j.at("initial").get<std::vector<std::string>>();
    r.returned = j.value("returned", false);
    if (j.contains("t_half")) r.t_half = j["t_half"].get<std::int64_t>();
    if (j.contains("nc_series")) r.nc_series = j["nc_series"].get<std::vector<std::int64_t>>();
    if (j.contains("g_series")) r.g_series = j["g_series"].get<std::vector<std::int64_t>>();
    if (j.contains("lambda")) r.lambda = j["lambda"].get<std::int64_t>();
    r.mcl_all_equal = j.value("mcl_all_equal", false);
    r.mcl_divisible_by_4 = j.value("mcl_divisible_by_4", false);
    r.per_cell_digest = j.value("per_cell_digest", "");
    r.final_checksum = j.value("final_checksum", "");
    if (j.contains("events"))
        for (const auto& e : j["events"])
            r.events.push_back({e.at("t").get<std::int64_t>(), e.at("phase").get<int>(), e.at("nc").get<std::int64_t>()});
    if (j.contains("superriver_early")) r.superriver_early = j["superriver_early"].get<bool>();
    r.screened_out = j.value("screened_out", false);
    r.error = j.value("error", "");
    if (j.contains("meta")) r.wall_ms = j["meta"].value("wall_ms", 0.0);
    return r;
}

void RunRecord::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path);
    os << to_json_text() << '\n';
}

RunRecord RunRecord::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_json_text(buf.str());
}

SweepConfig SweepConfig::from_json_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("sweep config is not valid JSON: ") + e.what());
    }
    SweepConfig c;
    c.mask_paths = j.at("masks").get<std::vector<std::string>>();
    c.dims = j.at("dims").get<std::vector<int>>();
    const std::string boundary = j.value("boundary", std::string(c.dims.size(), 'P'));
    c.periodic = parse_boundary_flags(boundary, static_cast<int>(c.dims.size()));
    c.n_points = j.at("n_points").get<std::int64_t>();
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.max_steps = j.value("max_steps", std::int64_t{100000});
    if (j.contains("early_screen") && !j["early_screen"].is_null())
        c.early_screen = j["early_screen"].get<std::int64_t>();
    c.superriver_horizon = j.value("superriver_horizon", std::int64_t{200});
    if (j.contains("analyses")) {
        c.analyze_mcl = false;
        c.analyze_events = false;
        c.record_g = false;
        for (const auto& a : j["analyses"]) {
            const std::string name = a.get<std::string>();
            if (name == "mcl")
                c.analyze_mcl = true;
            else if (name == "events")
                c.analyze_events = true;
            else if (name == "integral" || name == "symmetry")
                c.record_g = true;
            else
                throw Error("unknown analysis '" + name + "'");
        }
    }
    c.reversal_threshold = j.value("reversal_threshold", std::int64_t{5});
    c.reversal_window = j.value("reversal_window", std::int64_t{50});
    if (c.mask_paths.empty()) throw Error("sweep config lists no masks");
    if (c.seeds.empty()) throw Error("sweep config lists no seeds");
    for (std::size_t i = 0; i < c.seeds.size(); ++i)
        for (std::size_t k = i + 1; k < c.seeds.size(); ++k)
            if (c.seeds[i] == c.seeds[k]) throw Error("sweep seeds must be distinct");
    return c;
}

SweepConfig SweepConfig::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_json_text(buf.str());
}

std::string SweepConfig::to_json_text() const {
    json j;
    j["masks"] = mask_paths;
    j["dims"] = dims;
    j["boundary"] = format_boundary_flags(periodic);
    j["n_points"] = n_points;
    j["seeds"] = seeds;
    j["max_steps"] = max_steps;
    if (early_screen) j["early_screen"] = *early_screen;
    j["superriver_horizon"] = superriver_horizon;
    json analyses = json::array();
    if (analyze_mcl) analyses.push_back("mcl");
    if (analyze_events) analyses.push_back("events");
    if (record_g) analyses.push_back("integral");
    j["analyses"] = analyses;
    return j.dump(1);
}

namespace {

std::string path_stem(const std::string& path) {
    std::size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = name.find_last_of('.');
    if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
    return name;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

}  // namespace

std::vector<SweepRow> sweep(const SweepConfig& config, int jobs) {
    std::vector<RunSpec> specs;
    std::map<std::string, int> stem_uses;
    for (const auto& path : config.mask_paths) {
        const std::string text = read_file(path);
        Mask::parse(text);  // validate up front: a bad mask fails the sweep, not a row
        std::string id = path_stem(path);
        const int uses = stem_uses[id]++;
        if (uses > 0) id += "#" + std::to_string(uses);
        for (std::uint64_t seed : config.seeds) {
            RunSpec s;
            s.mask_id = id;
            s.mask_text = text;
            s.dims = config.dims;
            s.periodic = config.periodic;
            s.n_points = config.n_points;
            s.seed = seed;
            s.max_steps = config.max_steps;
            s.early_screen = config.early_screen;
            s.superriver_horizon = config.superriver_horizon;
            s.analyze_mcl = config.analyze_mcl;
            s.analyze_events = config.analyze_events;
            s.record_g = config.record_g;
            s.reversal_threshold = config.reversal_threshold;
            s.reversal_window = config.reversal_window;
            specs.push_back(std::move(s));
        }
    }

    std::vector<SweepRow> rows(specs.size());
    std::atomic<std::size_t> next{0};
    const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(specs.size())));
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            rows[i] = run_experiment(specs[i]).first;
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return std::tie(a.mask_id, a.seed) < std::tie(b.mask_id, b.seed);
    });
    return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    std::ostringstream os;
    os << "mask_id,seed,dims,n_points,returned,t_half,lambda,local_reversal_count,superriver_early\n";
    for (const auto& r : rows) {
        os << r.mask_id << ',' << r.seed << ',' << r.dims_str << ',' << r.n_points << ',' << (r.returned ? 1 : 0) << ',';
        if (r.t_half) os << *r.t_half;
        os << ',';
        if (r.lambda) os << *r.lambda;
        os << ',';
        if (r.local_reversal_count) os << *r.local_reversal_count;
        os << ',';
        if (r.superriver_early) os << (*r.superriver_early ? 1 : 0);
        os << '\n';
    }
    return os.str();
}

std::string sweep_timing_csv(std::span<const SweepRow> rows) {
    std::ostringstream os;
    os << "mask_id,seed,wall_ms,error\n";
    for (const auto& r : rows) {
        std::string err = r.error;
        for (auto& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        os << r.mask_id << ',' << r.seed << ',' << r.wall_ms << ',' << err << '\n';
    }
    return os.str();
}

void write_sweep_outputs(std::span<const SweepRow> rows, const std::string& csv_path) {
    {
        std::ofstream os(csv_path, std::ios::binary);
        if (!os) throw Error("cannot write " + csv_path);
        os << sweep_csv(rows);
    }
    {
        std::ofstream os(csv_path + ".timing.csv", std::ios::binary);
        if (!os) throw Error("cannot write " + csv_path + ".timing.csv");
        os << sweep_timing_csv(rows);
    }
}

ScalingReport scaling_report(std::span<const SweepRow> rows) {
    struct Bucket {
        std::int64_t runs = 0;
        std::vector<std::int64_t> t_halves;
    };
    std::map<std::string, Bucket> buckets;
    for (const auto& r : rows) {
        auto& b = buckets[r.dims_str];
        ++b.runs;
        if (r.returned && r.t_half) b.t_halves.push_back(*r.t_half);
    }
    ScalingReport report;
    for (auto& [dims_str, b] : buckets) {
        ScalingEntry e;
        e.dims_str = dims_str;
        e.cells = 1;
        std::size_t pos = 0;
        while (pos <= dims_str.size()) {
            const std::size_t nxt = dims_str.find('x', pos);
            e.cells *= std::stoll(dims_str.substr(pos, nxt == std::string::npos ? std::string::npos : nxt - pos));
            if (nxt == std::string::npos) break;
            pos = nxt + 1;
        }
        e.runs = b.runs;
        e.returned_count = static_cast<std::int64_t>(b.t_halves.size());
        e.insufficient = e.returned_count < 10;
        if (!b.t_halves.empty()) {
            std::sort(b.t_halves.begin(), b.t_halves.end());
            e.median_t_half = b.t_halves[(b.t_halves.size() - 1) / 2];  // lower median
        }
        report.entries.push_back(std::move(e));
    }
    std::sort(report.entries.begin(), report.entries.end(),
              [](const ScalingEntry& a, const ScalingEntry& b) { return a.cells < b.cells; });
    for (std::size_t i = 1; i < report.entries.size(); ++i) {
        const auto& prev = report.entries[i - 1];
        auto& cur = report.entries[i];
        if (prev.median_t_half && cur.median_t_half && *prev.median_t_half > 0)
            cur.ratio_to_prev = static_cast<double>(*cur.median_t_half) / static_cast<double>(*prev.median_t_half);
    }
    return report;
}

std::string scaling_report_csv(const ScalingReport& report) {
    std::ostringstream os;
    os << "dims,cells,runs,returned,median_t_half,ratio_to_prev,insufficient\n";
    for (const auto& e : report.entries) {
        os << e.dims_str << ',' << e.cells << ',' << e.runs << ',' << e.returned_count << ',';
        if (e.median_t_half) os << *e.median_t_half;
        os << ',';
        if (e.ratio_to_prev) os << *e.ratio_to_prev;
        os << ',' << (e.insufficient ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace dcs
