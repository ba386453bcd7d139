#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dcs/filters.hpp"
#include "dcs/trajectory.hpp"

namespace dcs {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

/// Display colors. The published figures fix the intent (A white, B blue,
/// C red; A_F 0/1/3/4 = yellow/blue/red/purple, 2 split gray/green) but not
/// exact RGB values, so everything here is overridable.
struct Palette {
    Rgb state_a{255, 255, 255}, state_b{0, 0, 255}, state_c{255, 0, 0};
    Rgb af0{255, 255, 0}, af1{0, 0, 255}, af3{255, 0, 0}, af4{128, 0, 128};
    Rgb af5{255, 165, 0}, af6{255, 255, 255};
    Rgb af2_bank{128, 128, 128}, af2_river{0, 176, 0}, af2_other{0, 128, 128};
    Rgb boundary_pos{0, 0, 0};      // +1: black
    Rgb boundary_neg{255, 255, 255};  // -1: white
    Rgb cross{0, 0, 0};
    double bank_dim_3d = 0.35;  // "transparent" Bank in slice sheets

    static Palette defaults() { return {}; }
    /// Partial overrides, e.g. {"af2_river": [0,255,0]}.
    static Palette from_json_text(std::string_view text);
};

struct Image {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0) {}
    void set(int x, int y, Rgb c) {
        auto* p = &rgb[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    }
    Rgb get(int x, int y) const {
        const auto* p = &rgb[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3];
        return {p[0], p[1], p[2]};
    }
    std::string to_ppm() const;  // binary P6, deterministic bytes
};

void write_ppm(const std::string& path, const Image& image);

using NamedImages = std::vector<std::pair<std::string, Image>>;

/// One pixel block per cell. 1D and 2D grids produce a single image at the
/// given path; 3D grids produce one sheet per axis-0 slice, suffixed _sNN.
NamedImages render_state(const Grid& g, const Palette& palette, int scale, const std::string& out_path);

struct FilterSelection {
    bool a = false;
    bool b[3] = {false, false, false};
    bool c[3] = {false, false, false};
};

/// Comma list of {a, b0, b1, b2, c0, c1, c2}.
FilterSelection parse_filter_selection(std::string_view text);

/// A_F as cell fill, B_F as boundary strokes, C_F as centered crosses,
/// composited in that order. Only in-slice boundary axes are drawable on 3D
/// sheets. Without 'a' the fill is the plain state frame at t.
NamedImages render_filters(Trajectory& run, std::int64_t t, const FilterSelection& which,
                           const Palette& palette, int scale, const std::string& out_path);

}  // namespace dcs
