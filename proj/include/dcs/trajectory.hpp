#pragma once

#include <cstdint>
#include <vector>

#include "dcs/engine.hpp"

namespace dcs {

// A run is fully determined by (start, mask); frames are recomputed on
// demand instead of stored. Backward stepping is exact, so negative times
// and rewinding are as cheap as stepping forward.
class Trajectory {
public:
    Trajectory(Grid start, Mask mask);

    const Grid& start() const { return start_; }
    const Mask& mask() const { return mask_; }
    std::int64_t cursor() const { return cursor_; }

    /// Materialize the frame at any time, negative included.
    Grid frame(std::int64_t t);
    void seek(std::int64_t t);
    const Stepper& stepper() const { return stepper_; }

private:
    Grid start_;
    Mask mask_;
    Stepper stepper_;
    std::int64_t cursor_ = 0;
};

/// Six consecutive frames t-2..t+3; the window is drawn between t and t+1.
struct FrameWindow {
    std::int64_t center_gap = 0;
    std::vector<Grid> frames;  // always exactly six

    const Grid& frame_at(std::int64_t u) const { return frames[static_cast<std::size_t>(u - (center_gap - 2))]; }
};

FrameWindow frame_window(Trajectory& run, std::int64_t t);

}  // namespace dcs
