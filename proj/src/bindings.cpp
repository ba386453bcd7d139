#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dcs/analysis.hpp"
#include "dcs/harness.hpp"
#include "dcs/prng.hpp"
#include "dcs/render.hpp"
#include "dcs/seeding.hpp"
#include "dcs/structures.hpp"

namespace py = pybind11;
using namespace dcs;

namespace {

py::array_t<std::uint8_t> grid_to_array(const Grid& g) {
    std::vector<py::ssize_t> shape(g.dims().begin(), g.dims().end());
    py::array_t<std::uint8_t> arr(shape);
    auto* data = arr.mutable_data();
    for (std::int64_t i = 0; i < g.size(); ++i) data[i] = static_cast<std::uint8_t>(g.cell(i));
    return arr;
}

Grid grid_from_array(py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> arr,
                     const std::string& boundary) {
    std::vector<int> dims;
    for (py::ssize_t k = 0; k < arr.ndim(); ++k) dims.push_back(static_cast<int>(arr.shape(k)));
    Grid g(dims, parse_boundary_flags(boundary, static_cast<int>(dims.size())));
    const auto* data = arr.data();
    for (std::int64_t i = 0; i < g.size(); ++i) {
        if (data[i] > 2) throw Error("cell values must be 0 (A), 1 (B) or 2 (C)");
        g.set_cell(i, static_cast<Cell>(data[i]));
    }
    return g;
}

template <typename T>
py::array_t<T> lattice_to_array(const std::vector<T>& values, const std::vector<int>& dims) {
    std::vector<py::ssize_t> shape(dims.begin(), dims.end());
    py::array_t<T> arr(shape);
    std::copy(values.begin(), values.end(), arr.mutable_data());
    return arr;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Three-state reversible cellular automaton laboratory";

    py::register_exception<Error>(m, "DcsError");

    py::enum_<Cell>(m, "Cell").value("A", Cell::A).value("B", Cell::B).value("C", Cell::C);

    py::class_<Grid>(m, "Grid")
        .def(py::init([](const std::vector<int>& dims) { return Grid(dims); }), py::arg("dims"))
        .def(py::init([](const std::vector<int>& dims, const std::string& boundary) {
                 return Grid(dims, parse_boundary_flags(boundary, static_cast<int>(dims.size())));
             }),
             py::arg("dims"), py::arg("boundary"))
        .def_static("parse", &Grid::parse)
        .def_static("from_array", &grid_from_array, py::arg("cells"), py::arg("boundary"))
        .def("to_text", &Grid::to_text)
        .def("to_array", &grid_to_array)
        .def_property_readonly("dims", &Grid::dims)
        .def_property_readonly("boundary", [](const Grid& g) { return format_boundary_flags(g.periodic_flags()); })
        .def_property_readonly("size", &Grid::size)
        .def("at", [](const Grid& g, const std::vector<int>& coords) { return g.at(coords); })
        .def("set", [](Grid& g, const std::vector<int>& coords, Cell c) { g.set(coords, c); })
        .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
        .def("checksum", &grid_checksum);

    py::class_<StateCounts>(m, "StateCounts")
        .def_readonly("a", &StateCounts::a)
        .def_readonly("b", &StateCounts::b)
        .def_readonly("c", &StateCounts::c)
        .def("__repr__", [](const StateCounts& s) {
            return "StateCounts(a=" + std::to_string(s.a) + ", b=" + std::to_string(s.b) + ", c=" + std::to_string(s.c) + ")";
        });

    m.def("count_states", &count_states);
    m.def("transliterate", py::overload_cast<const Grid&>(&transliterate));
    m.def("random_initial",
          py::overload_cast<const std::vector<int>&, std::int64_t, std::uint64_t>(&random_initial),
          py::arg("dims"), py::arg("n_points"), py::arg("seed"));
    m.def("random_initial",
          [](const std::vector<int>& dims, const std::string& boundary, std::int64_t n, std::uint64_t seed) {
              return random_initial(dims, parse_boundary_flags(boundary, static_cast<int>(dims.size())), n, seed);
          },
          py::arg("dims"), py::arg("boundary"), py::arg("n_points"), py::arg("seed"));

    py::class_<ParityBalance>(m, "ParityBalance")
        .def_readonly("even", &ParityBalance::even)
        .def_readonly("odd", &ParityBalance::odd)
        .def("one_sided", &ParityBalance::one_sided);

    py::class_<SymmetryViolation>(m, "SymmetryViolation")
        .def_readonly("offset", &SymmetryViolation::offset)
        .def_readonly("image", &SymmetryViolation::image)
        .def_readonly("element", &SymmetryViolation::element);

    py::class_<Mask>(m, "Mask")
        .def(py::init<int, std::vector<std::vector<int>>>(), py::arg("dim"), py::arg("offsets"))
        .def_static("parse", &Mask::parse)
        .def("to_text", &Mask::to_text)
        .def_property_readonly("dim", &Mask::dim)
        .def_property_readonly("rank", &Mask::rank)
        .def_property_readonly("includes_center", &Mask::includes_center)
        .def_property_readonly("offsets", &Mask::offsets);

    m.def("validate_mask_symmetry", &validate_mask_symmetry);
    m.def("mask_parity_balance", &mask_parity_balance);
    m.def("hypercube_symmetries", &hypercube_symmetries);

    m.def("step_forward", py::overload_cast<const Grid&, const Mask&>(&step_forward));
    m.def("step_backward", py::overload_cast<const Grid&, const Mask&>(&step_backward));
    m.def("advance", &advance, py::arg("grid"), py::arg("mask"), py::arg("steps"));
    m.def("c_presence_map", [](const Grid& g, const Mask& mask) {
        return lattice_to_array(c_presence_map(g, mask), g.dims());
    });
    m.def("naive_step_forward", &naive::step_forward);
    m.def("naive_step_backward", &naive::step_backward);
    m.def("naive_c_presence_map", [](const Grid& g, const Mask& mask) {
        return lattice_to_array(naive::c_presence_map(g, mask), g.dims());
    });

    py::class_<RunOutcome>(m, "RunOutcome")
        .def_readonly("returned", &RunOutcome::returned)
        .def_readonly("t_half", &RunOutcome::t_half)
        .def_readonly("nc_series", &RunOutcome::nc_series)
        .def_readonly("wall_seconds", &RunOutcome::wall_seconds)
        .def_readonly("final_checksum", &RunOutcome::final_checksum);

    m.def("run_to_mirror", &run_to_mirror, py::arg("start"), py::arg("mask"), py::arg("max_steps"),
          py::arg("callback") = FrameCallback{});

    py::class_<Trajectory>(m, "Trajectory")
        .def(py::init<Grid, Mask>(), py::arg("start"), py::arg("mask"))
        .def("frame", &Trajectory::frame)
        .def_property_readonly("start", &Trajectory::start)
        .def_property_readonly("mask", &Trajectory::mask);

    py::class_<FrameWindow>(m, "FrameWindow")
        .def_readonly("center_gap", &FrameWindow::center_gap)
        .def_readonly("frames", &FrameWindow::frames);

    m.def("frame_window", &frame_window, py::arg("run"), py::arg("t"));

    py::enum_<PatternClass>(m, "PatternClass")
        .value("Bank", PatternClass::Bank)
        .value("River", PatternClass::River)
        .value("Other", PatternClass::Other);

    m.def("classify_cell_pattern", [](const std::vector<Cell>& states) {
        if (states.size() != 6) throw Error("classify_cell_pattern needs exactly 6 states");
        return classify_cell_pattern(std::span<const Cell, 6>(states.data(), 6));
    });

    py::class_<AFilterField>(m, "AFilterField")
        .def_readonly("center_gap", &AFilterField::center_gap)
        .def_readonly("dims", &AFilterField::dims)
        .def_property_readonly("values", [](const AFilterField& f) { return lattice_to_array(f.values, f.dims); })
        .def_property_readonly("pattern", [](const AFilterField& f) {
            std::vector<std::uint8_t> p(f.pattern.size());
            for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<std::uint8_t>(f.pattern[i]);
            return lattice_to_array(p, f.dims);
        });

    m.def("a_filter", &a_filter);

    py::class_<BFilterField>(m, "BFilterField")
        .def_readonly("index", &BFilterField::index)
        .def_readonly("axis", &BFilterField::axis)
        .def_readonly("center_gap", &BFilterField::center_gap)
        .def_readonly("dims", &BFilterField::dims)
        .def_property_readonly("values", [](const BFilterField& f) { return lattice_to_array(f.values, f.dims); })
        .def("boundary_exists", &BFilterField::boundary_exists);

    m.def("b_filter", &b_filter, py::arg("run"), py::arg("t"), py::arg("i"), py::arg("axis"));
    m.def("boundary_indicator", [](const Grid& g, int axis) { return lattice_to_array(boundary_indicator(g, axis), g.dims()); });

    py::class_<CFilterField>(m, "CFilterField")
        .def_readonly("index", &CFilterField::index)
        .def_readonly("center_gap", &CFilterField::center_gap)
        .def_readonly("dims", &CFilterField::dims)
        .def_property_readonly("values", [](const CFilterField& f) { return lattice_to_array(f.values, f.dims); });

    m.def("c_filter", &c_filter, py::arg("run"), py::arg("t"), py::arg("i"));

    py::class_<Component>(m, "Component")
        .def_readonly("id", &Component::id)
        .def_readonly("cells", &Component::cells)
        .def_readonly("wraps", &Component::wraps)
        .def_readonly("size", &Component::size);

    m.def("label_components", [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> marked,
                                 const std::string& boundary) {
        std::vector<int> dims;
        for (py::ssize_t k = 0; k < marked.ndim(); ++k) dims.push_back(static_cast<int>(marked.shape(k)));
        std::vector<std::uint8_t> values(marked.data(), marked.data() + marked.size());
        return label_components(values, dims, parse_boundary_flags(boundary, static_cast<int>(dims.size())));
    });
    m.def("label_river_components", &label_river_components);
    m.def("window_has_wrapping_river", &window_has_wrapping_river);
    m.def("detect_superriver_early", &detect_superriver_early, py::arg("run"), py::arg("horizon") = 200);

    py::class_<NullRiverSighting>(m, "NullRiverSighting")
        .def_readonly("cell", &NullRiverSighting::cell)
        .def_readonly("phase_offset", &NullRiverSighting::phase_offset)
        .def_readonly("conforming", &NullRiverSighting::conforming)
        .def_readonly("center_outline", &NullRiverSighting::center_outline)
        .def_readonly("footprint_outline", &NullRiverSighting::footprint_outline)
        .def_property_readonly("word", [](const NullRiverSighting& s) {
            return std::vector<Cell>(s.word.begin(), s.word.end());
        });

    m.def("detect_nullrivers", &detect_nullrivers, py::arg("run"), py::arg("t"),
          py::arg("radius") = std::nullopt);
    m.def("detect_nullrivers_frames", [](const std::vector<Grid>& frames, const Mask& mask, std::optional<int> radius) {
        return detect_nullrivers_frames(frames, mask, radius);
    }, py::arg("frames"), py::arg("mask"), py::arg("radius") = std::nullopt);

    py::class_<SignatureStats>(m, "SignatureStats")
        .def_readonly("n_sightings", &SignatureStats::n_sightings)
        .def_readonly("n_conforming", &SignatureStats::n_conforming)
        .def_readonly("n_nonconforming", &SignatureStats::n_nonconforming)
        .def_readonly("closes_square", &SignatureStats::closes_square)
        .def_readonly("diagonal_counterexamples", &SignatureStats::diagonal_counterexamples)
        .def_readonly("phase_patterns", &SignatureStats::phase_patterns)
        .def_readonly("distance_to_initial_b", &SignatureStats::distance_to_initial_b);

    m.def("nullriver_signature_scan", [](const std::vector<NullRiverSighting>& sightings, const Grid* initial) {
        return nullriver_signature_scan(sightings, initial);
    }, py::arg("sightings"), py::arg("initial") = nullptr);
    m.def("signature_stats_csv", &signature_stats_csv);

    py::class_<LocalReversalEvent>(m, "LocalReversalEvent")
        .def_readonly("t", &LocalReversalEvent::t)
        .def_readonly("phase", &LocalReversalEvent::phase)
        .def_readonly("nc_value", &LocalReversalEvent::nc_value);

    m.def("detect_local_reversals", [](const std::vector<std::int64_t>& nc, std::int64_t threshold, std::int64_t window) {
        return detect_local_reversals(nc, threshold, window);
    }, py::arg("nc_series"), py::arg("threshold") = 5, py::arg("window") = 50);

    py::class_<MclResult>(m, "MclResult")
        .def_readonly("lambda_", &MclResult::lambda)
        .def_readonly("per_cell_sums", &MclResult::per_cell_sums)
        .def_readonly("all_equal", &MclResult::all_equal)
        .def_readonly("divisible_by_4", &MclResult::divisible_by_4);

    m.def("mcl_lambda", py::overload_cast<const Grid&, const Mask&, std::int64_t>(&mcl_lambda),
          py::arg("start"), py::arg("mask"), py::arg("t_half"));
    m.def("accumulate_F", &accumulate_F, py::arg("start"), py::arg("mask"), py::arg("t"));
    m.def("f_odd_census", &f_odd_census, py::arg("start"), py::arg("mask"), py::arg("t_max"));
    m.def("compute_g_series", &compute_g_series, py::arg("start"), py::arg("mask"), py::arg("t_max"));
    m.def("main_integral", [](const std::vector<std::int64_t>& g, std::int64_t t0, std::int64_t t,
                              std::optional<std::int64_t> t_half) { return main_integral(g, t0, t, t_half); },
          py::arg("g_series"), py::arg("t0"), py::arg("t"), py::arg("t_half") = std::nullopt);
    m.def("s_series_from_g", [](const std::vector<std::int64_t>& g, std::optional<std::int64_t> t_half) {
        return s_series_from_g(g, t_half);
    }, py::arg("g_series"), py::arg("t_half") = std::nullopt);

    py::class_<PhaseSeries>(m, "PhaseSeries")
        .def_property_readonly("phases", [](const PhaseSeries& p) {
            return std::vector<std::vector<std::int64_t>>(p.phases.begin(), p.phases.end());
        });
    m.def("phase_series", [](const std::vector<std::int64_t>& nc) { return phase_series(nc); });

    py::class_<MedianSeries>(m, "MedianSeries")
        .def_readonly("t_begin", &MedianSeries::t_begin)
        .def_readonly("m", &MedianSeries::m)
        .def_readonly("phase_id", &MedianSeries::phase_id);
    m.def("median_series", &median_series, py::arg("phase_series"), py::arg("use_mean") = false);

    py::class_<FitSegment>(m, "FitSegment")
        .def_readonly("start_t", &FitSegment::start_t)
        .def_readonly("sign", &FitSegment::sign)
        .def_readonly("offset", &FitSegment::offset);

    py::class_<SymmetryFit>(m, "SymmetryFit")
        .def_readonly("k", &SymmetryFit::k)
        .def_readonly("residual", &SymmetryFit::residual)
        .def_readonly("correlation", &SymmetryFit::correlation)
        .def_readonly("correlation_near_mirror", &SymmetryFit::correlation_near_mirror)
        .def_readonly("segments", &SymmetryFit::segments)
        .def_readonly("t_begin", &SymmetryFit::t_begin)
        .def_readonly("model", &SymmetryFit::model);

    m.def("fit_symmetry", [](const MedianSeries& med, const std::vector<double>& s, std::int64_t t_half) {
        return fit_symmetry(med, s, t_half);
    }, py::arg("median"), py::arg("s_series"), py::arg("t_half"));

    py::class_<SplitMix64>(m, "SplitMix64")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("next", &SplitMix64::next);

    py::class_<RunSpec>(m, "RunSpec")
        .def(py::init<>())
        .def_readwrite("mask_id", &RunSpec::mask_id)
        .def_readwrite("mask_text", &RunSpec::mask_text)
        .def_readwrite("dims", &RunSpec::dims)
        .def_property("boundary",
                      [](const RunSpec& s) { return format_boundary_flags(s.periodic); },
                      [](RunSpec& s, const std::string& b) { s.periodic = parse_boundary_flags(b, static_cast<int>(s.dims.size())); })
        .def_readwrite("n_points", &RunSpec::n_points)
        .def_readwrite("seed", &RunSpec::seed)
        .def_readwrite("max_steps", &RunSpec::max_steps)
        .def_readwrite("early_screen", &RunSpec::early_screen)
        .def_readwrite("superriver_horizon", &RunSpec::superriver_horizon)
        .def_readwrite("analyze_mcl", &RunSpec::analyze_mcl)
        .def_readwrite("analyze_events", &RunSpec::analyze_events)
        .def_readwrite("record_g", &RunSpec::record_g);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("mask_id", &SweepRow::mask_id)
        .def_readonly("seed", &SweepRow::seed)
        .def_readonly("dims_str", &SweepRow::dims_str)
        .def_readonly("n_points", &SweepRow::n_points)
        .def_readonly("returned", &SweepRow::returned)
        .def_readonly("t_half", &SweepRow::t_half)
        .def_readonly("lambda_", &SweepRow::lambda)
        .def_readonly("local_reversal_count", &SweepRow::local_reversal_count)
        .def_readonly("superriver_early", &SweepRow::superriver_early)
        .def_readonly("wall_ms", &SweepRow::wall_ms)
        .def_readonly("error", &SweepRow::error);

    py::class_<RunRecord>(m, "RunRecord")
        .def_readonly("mask_id", &RunRecord::mask_id)
        .def_readonly("returned", &RunRecord::returned)
        .def_readonly("t_half", &RunRecord::t_half)
        .def_readonly("nc_series", &RunRecord::nc_series)
        .def_readonly("g_series", &RunRecord::g_series)
        .def_readonly("lambda_", &RunRecord::lambda)
        .def_readonly("mcl_all_equal", &RunRecord::mcl_all_equal)
        .def_readonly("mcl_divisible_by_4", &RunRecord::mcl_divisible_by_4)
        .def_readonly("per_cell_digest", &RunRecord::per_cell_digest)
        .def_readonly("final_checksum", &RunRecord::final_checksum)
        .def_readonly("events", &RunRecord::events)
        .def_readonly("superriver_early", &RunRecord::superriver_early)
        .def_readonly("screened_out", &RunRecord::screened_out)
        .def_readonly("error", &RunRecord::error)
        .def("initial_grid", &RunRecord::initial_grid)
        .def("mask", &RunRecord::mask)
        .def("to_json_text", &RunRecord::to_json_text)
        .def_static("from_json_text", [](const std::string& s) { return RunRecord::from_json_text(s); })
        .def("save", &RunRecord::save)
        .def_static("load", &RunRecord::load);

    m.def("run_experiment", &run_experiment);

    py::class_<SweepConfig>(m, "SweepConfig")
        .def(py::init<>())
        .def_static("from_json_text", [](const std::string& s) { return SweepConfig::from_json_text(s); })
        .def_static("load", &SweepConfig::load)
        .def("to_json_text", &SweepConfig::to_json_text)
        .def_readwrite("mask_paths", &SweepConfig::mask_paths)
        .def_readwrite("dims", &SweepConfig::dims)
        .def_readwrite("n_points", &SweepConfig::n_points)
        .def_readwrite("seeds", &SweepConfig::seeds)
        .def_readwrite("max_steps", &SweepConfig::max_steps);

    m.def("sweep", &sweep, py::arg("config"), py::arg("jobs") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("sweep_csv", [](const std::vector<SweepRow>& rows) { return sweep_csv(rows); });
    m.def("write_sweep_outputs", [](const std::vector<SweepRow>& rows, const std::string& path) {
        write_sweep_outputs(rows, path);
    });

    py::class_<ScalingEntry>(m, "ScalingEntry")
        .def_readonly("dims_str", &ScalingEntry::dims_str)
        .def_readonly("cells", &ScalingEntry::cells)
        .def_readonly("runs", &ScalingEntry::runs)
        .def_readonly("returned_count", &ScalingEntry::returned_count)
        .def_readonly("median_t_half", &ScalingEntry::median_t_half)
        .def_readonly("ratio_to_prev", &ScalingEntry::ratio_to_prev)
        .def_readonly("insufficient", &ScalingEntry::insufficient);

    py::class_<ScalingReport>(m, "ScalingReport").def_readonly("entries", &ScalingReport::entries);

    m.def("scaling_report", [](const std::vector<SweepRow>& rows) { return scaling_report(rows); });
    m.def("scaling_report_csv", &scaling_report_csv);

    py::class_<Palette>(m, "Palette")
        .def(py::init<>())
        .def_static("defaults", &Palette::defaults)
        .def_static("from_json_text", [](const std::string& s) { return Palette::from_json_text(s); });

    py::class_<Image>(m, "Image")
        .def_readonly("width", &Image::width)
        .def_readonly("height", &Image::height)
        .def("to_ppm", [](const Image& img) { return py::bytes(img.to_ppm()); });

    py::class_<FilterSelection>(m, "FilterSelection").def(py::init<>());
    m.def("parse_filter_selection", &parse_filter_selection);

    m.def("render_state", &render_state, py::arg("grid"), py::arg("palette") = Palette::defaults(),
          py::arg("scale") = 8, py::arg("out_path") = std::string("frame.ppm"));
    m.def("render_filters", &render_filters, py::arg("run"), py::arg("t"), py::arg("which"),
          py::arg("palette") = Palette::defaults(), py::arg("scale") = 8,
          py::arg("out_path") = std::string("filters.ppm"));
    m.def("write_ppm", &write_ppm);
}
