#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcs/analysis.hpp"
#include "dcs/mask.hpp"
#include "dcs/seeding.hpp"

namespace dcs {

/// One seeded run: everything needed to reproduce it bit-exactly.
struct RunSpec {
    std::string mask_id;
    std::string mask_text;
    std::vector<int> dims;
    std::vector<std::uint8_t> periodic;
    std::int64_t n_points = 8;
    std::uint64_t seed = 0;
    std::int64_t max_steps = 100000;
    std::optional<std::int64_t> early_screen;  // skip the run if no superriver by this step
    std::int64_t superriver_horizon = 200;
    bool analyze_mcl = true;
    bool analyze_events = true;
    bool record_g = true;
    std::int64_t reversal_threshold = 5;
    std::int64_t reversal_window = 50;

    Mask mask() const { return Mask::parse(mask_text); }
};

struct SweepRow {
    std::string mask_id;
    std::uint64_t seed = 0;
    std::string dims_str;
    std::int64_t n_points = 0;
    bool returned = false;
    std::optional<std::int64_t> t_half;
    std::optional<std::int64_t> lambda;
    std::optional<std::int64_t> local_reversal_count;
    std::optional<bool> superriver_early;
    double wall_ms = 0;  // quarantined to the timing sidecar, never in the results CSV
    std::string error;
};

struct RunRecord {
    std::string mask_id;
    std::string mask_text;
    std::vector<int> dims;
    std::vector<std::uint8_t> periodic;
    std::int64_t n_points = 0;
    std::uint64_t seed = 0;
    std::int64_t max_steps = 0;
    std::vector<std::string> initial_rows;
    bool returned = false;
    std::optional<std::int64_t> t_half;
    std::vector<std::int64_t> nc_series;
    std::vector<std::int64_t> g_series;
    std::optional<std::int64_t> lambda;
    bool mcl_all_equal = false;
    bool mcl_divisible_by_4 = false;
    std::string per_cell_digest;
    std::string final_checksum;
    std::vector<LocalReversalEvent> events;
    std::optional<bool> superriver_early;
    bool screened_out = false;
    double wall_ms = 0;
    std::string error;

    Grid initial_grid() const;
    Mask mask() const { return Mask::parse(mask_text); }
    Trajectory trajectory() const { return Trajectory(initial_grid(), mask()); }

    std::string to_json_text() const;
    static RunRecord from_json_text(std::string_view text);
    void save(const std::string& path) const;
    static RunRecord load(const std::string& path);
};

std::pair<SweepRow, RunRecord> run_experiment(const RunSpec& spec);

struct SweepConfig {
    std::vector<std::string> mask_paths;
    std::vector<int> dims;
    std::vector<std::uint8_t> periodic;
    std::int64_t n_points = 8;
    std::vector<std::uint64_t> seeds;
    std::int64_t max_steps = 100000;
    std::optional<std::int64_t> early_screen;
    std::int64_t superriver_horizon = 200;
    bool analyze_mcl = true;
    bool analyze_events = true;
    bool record_g = false;
    std::int64_t reversal_threshold = 5;
    std::int64_t reversal_window = 50;

    static SweepConfig from_json_text(std::string_view text);
    static SweepConfig load(const std::string& path);
    std::string to_json_text() const;
};

/// Full mask x seed cross product. Rows are computed in parallel but the
/// result is sorted by (mask_id, seed): content is a pure function of the
/// config, independent of the job count.
std::vector<SweepRow> sweep(const SweepConfig& config, int jobs = 1);

std::string sweep_csv(std::span<const SweepRow> rows);
std::string sweep_timing_csv(std::span<const SweepRow> rows);
void write_sweep_outputs(std::span<const SweepRow> rows, const std::string& csv_path);

struct ScalingEntry {
    std::string dims_str;
    std::int64_t cells = 0;
    std::int64_t runs = 0;
    std::int64_t returned_count = 0;
    std::optional<std::int64_t> median_t_half;  // lower median of returned runs
    std::optional<double> ratio_to_prev;
    bool insufficient = false;  // fewer than 10 returned runs
};

struct ScalingReport {
    std::vector<ScalingEntry> entries;  // ordered by cell count
};

ScalingReport scaling_report(std::span<const SweepRow> rows);
std::string scaling_report_csv(const ScalingReport& report);

}  // namespace dcs
