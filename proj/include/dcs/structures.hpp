#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dcs/filters.hpp"

namespace dcs {

struct Component {
    int id = 0;
    std::vector<std::int64_t> cells;   // linear indices, sorted
    std::vector<bool> wraps;           // per axis
    std::int64_t size = 0;
};

/// Connected components of the marked cells under Moore adjacency (8
/// neighbors in 2D, 26 in 3D). Winding is detected by an offset-carrying
/// union-find: joining two already-connected cells through a displacement
/// that does not cancel means the component closes around that axis.
std::vector<Component> label_components(std::span<const std::uint8_t> marked,
                                        const std::vector<int>& dims,
                                        const std::vector<std::uint8_t>& periodic);

using RiverComponent = Component;

std::vector<RiverComponent> label_river_components(const AFilterField& af);

/// True iff some river component winds around a periodic axis.
bool window_has_wrapping_river(const FrameWindow& window);

/// Scan windows t = 0..horizon for a torus-winding river; used to screen
/// seeds cheaply before committing to a full run.
bool detect_superriver_early(Trajectory& run, std::int64_t horizon = 200);

/// An isolated cell of minimal temporal period 12 embedded in period-6
/// surroundings, with its per-phase boundary outlines.
struct NullRiverSighting {
    std::vector<int> cell;
    std::array<Cell, 12> word{};
    int phase_offset = -1;   // rotation aligning the outlines to the canonical template
    bool conforming = false;
    // outline[p] = signed boundary changes between frames p and p+1 around the
    // cell itself (2d entries: -axis side then +axis side, per axis).
    std::vector<std::vector<std::int8_t>> center_outline;
    std::vector<std::vector<std::int8_t>> footprint_outline;
};

/// frames must hold the 13 consecutive frames t-5..t+7.
std::vector<NullRiverSighting> detect_nullrivers_frames(std::span<const Grid> frames,
                                                        const Mask& mask,
                                                        std::optional<int> radius = std::nullopt);

std::vector<NullRiverSighting> detect_nullrivers(Trajectory& run, std::int64_t t,
                                                 std::optional<int> radius = std::nullopt);

struct SignatureStats {
    std::int64_t n_sightings = 0;
    std::int64_t n_conforming = 0;
    std::int64_t n_nonconforming = 0;
    std::int64_t closes_square = 0;           // white phases jointly cover the cell outline
    std::int64_t diagonal_counterexamples = 0;  // the conjectured-absent corner split
    // per canonical phase: outline pattern string -> count
    std::vector<std::vector<std::pair<std::string, std::int64_t>>> phase_patterns;
    std::vector<double> distance_to_initial_b;  // per sighting, when an initial grid is given
};

SignatureStats nullriver_signature_scan(std::span<const NullRiverSighting> sightings,
                                        const Grid* initial = nullptr);
std::string signature_stats_csv(const SignatureStats& stats);

struct LocalReversalEvent {
    std::int64_t t = 0;
    int phase = 0;  // t mod 3
    std::int64_t nc_value = 0;
    bool operator==(const LocalReversalEvent&) const = default;
};

/// Times t >= 1 where N_C dips to a window minimum not above the threshold;
/// runs of qualifying steps collapse to the earliest minimum. A terminal
/// mirror (value 0) always yields the final event.
std::vector<LocalReversalEvent> detect_local_reversals(std::span<const std::int64_t> nc_series,
                                                       std::int64_t threshold = 5,
                                                       std::int64_t window = 50);

}  // namespace dcs
