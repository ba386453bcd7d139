#include "dcs/trajectory.hpp"

namespace dcs {

Trajectory::Trajectory(Grid start, Mask mask)
    : start_(std::move(start)), mask_(std::move(mask)), stepper_(start_, mask_) {}

void Trajectory::seek(std::int64_t t) {
    while (cursor_ < t) {
        stepper_.step_forward();
        ++cursor_;
    }
    while (cursor_ > t) {
        stepper_.step_backward();
        --cursor_;
    }
}

Grid Trajectory::frame(std::int64_t t) {
    seek(t);
    return stepper_.grid();
}

FrameWindow frame_window(Trajectory& run, std::int64_t t) {
    FrameWindow w;
    w.center_gap = t;
    w.frames.reserve(6);
    for (int k = 0; k < 6; ++k) w.frames.push_back(run.frame(t - 2 + k));
    return w;
}

}  // namespace dcs
