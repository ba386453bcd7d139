#include "dcs/render.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace dcs {

namespace {

Rgb rgb_from_json(const nlohmann::json& v) {
    if (!v.is_array() || v.size() != 3) throw Error("palette colors must be [r,g,b] arrays");
    return {v[0].get<std::uint8_t>(), v[1].get<std::uint8_t>(), v[2].get<std::uint8_t>()};
}

}  // namespace

Palette Palette::from_json_text(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("palette is not valid JSON: ") + e.what());
    }
    Palette p;
    auto grab = [&](const char* key, Rgb& slot) {
        if (j.contains(key)) slot = rgb_from_json(j[key]);
    };
    grab("state_a", p.state_a);
    grab("state_b", p.state_b);
    grab("state_c", p.state_c);
    grab("af0", p.af0);
    grab("af1", p.af1);
    grab("af3", p.af3);
    grab("af4", p.af4);
    grab("af5", p.af5);
    grab("af6", p.af6);
    grab("af2_bank", p.af2_bank);
    grab("af2_river", p.af2_river);
    grab("af2_other", p.af2_other);
    grab("boundary_pos", p.boundary_pos);
    grab("boundary_neg", p.boundary_neg);
    grab("cross", p.cross);
    if (j.contains("bank_dim_3d")) p.bank_dim_3d = j["bank_dim_3d"].get<double>();
    return p;
}

std::string Image::to_ppm() const {
    std::ostringstream os;
    os << "P6\n" << width << ' ' << height << "\n255\n";
    os.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    return os.str();
}

void write_ppm(const std::string& path, const Image& image) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path);
    const std::string bytes = image.to_ppm();
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

namespace {

struct SliceView {
    // maps 2D sheet coordinates (row, col) to grid linear indices
    std::int64_t base = 0;
    std::int64_t row_stride = 0;
    int rows = 0;
    int cols = 0;

    std::int64_t index(int row, int col) const { return base + row * row_stride + col; }
};

SliceView slice_view(const Grid& g, int slice) {
    const auto& dims = g.dims();
    SliceView v;
    if (g.dim() == 1) {
        v.rows = 1;
        v.cols = dims[0];
        v.row_stride = dims[0];
    } else if (g.dim() == 2) {
        v.rows = dims[0];
        v.cols = dims[1];
        v.row_stride = dims[1];
    } else if (g.dim() == 3) {
        v.rows = dims[1];
        v.cols = dims[2];
        v.row_stride = dims[2];
        v.base = static_cast<std::int64_t>(slice) * dims[1] * dims[2];
    } else {
        throw Error("rendering supports up to 3 dimensions");
    }
    return v;
}

Rgb dim(Rgb c, double f) {
    return {static_cast<std::uint8_t>(c.r * f), static_cast<std::uint8_t>(c.g * f),
            static_cast<std::uint8_t>(c.b * f)};
}

Rgb state_color(const Palette& p, Cell c) {
    return c == Cell::A ? p.state_a : c == Cell::B ? p.state_b : p.state_c;
}

Rgb af_color(const Palette& p, std::uint8_t value, PatternClass pat, bool dim_bank, double f) {
    switch (value) {
        case 0: return p.af0;
        case 1: return p.af1;
        case 2: {
            const Rgb base = pat == PatternClass::Bank ? p.af2_bank
                             : pat == PatternClass::River ? p.af2_river
                                                          : p.af2_other;
            return (dim_bank && pat == PatternClass::Bank) ? dim(base, f) : base;
        }
        case 3: return p.af3;
        case 4: return p.af4;
        case 5: return p.af5;
        default: return p.af6;
    }
}

void fill_block(Image& img, int col, int row, int scale, Rgb c) {
    for (int y = row * scale; y < (row + 1) * scale; ++y)
        for (int x = col * scale; x < (col + 1) * scale; ++x) img.set(x, y, c);
}

std::string slice_name(const std::string& out_path, int slice) {
    std::string stem = out_path;
    std::string ext = ".ppm";
    const std::size_t dot = out_path.find_last_of('.');
    const std::size_t slash = out_path.find_last_of("/\\");
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        stem = out_path.substr(0, dot);
        ext = out_path.substr(dot);
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "_s%02d", slice);
    return stem + buf + ext;
}

}  // namespace

NamedImages render_state(const Grid& g, const Palette& palette, int scale, const std::string& out_path) {
    if (scale < 1) throw Error("scale must be >= 1");
    NamedImages out;
    const int n_slices = g.dim() == 3 ? g.dims()[0] : 1;
    for (int s = 0; s < n_slices; ++s) {
        const SliceView v = slice_view(g, s);
        Image img(v.cols * scale, v.rows * scale);
        for (int row = 0; row < v.rows; ++row)
            for (int col = 0; col < v.cols; ++col)
                fill_block(img, col, row, scale, state_color(palette, g.cell(v.index(row, col))));
        out.emplace_back(g.dim() == 3 ? slice_name(out_path, s) : out_path, std::move(img));
    }
    return out;
}

FilterSelection parse_filter_selection(std::string_view text) {
    FilterSelection sel;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t next = text.find(',', pos);
        std::string tok{text.substr(pos, next == std::string::npos ? std::string::npos : next - pos)};
        if (!tok.empty()) {
            if (tok == "a")
                sel.a = true;
            else if (tok.size() == 2 && (tok[0] == 'b' || tok[0] == 'c') && tok[1] >= '0' && tok[1] <= '2') {
                const int i = tok[1] - '0';
                (tok[0] == 'b' ? sel.b : sel.c)[i] = true;
            } else
                throw Error("unknown filter '" + tok + "' (expected a, b0..b2, c0..c2)");
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return sel;
}

NamedImages render_filters(Trajectory& run, std::int64_t t, const FilterSelection& which,
                           const Palette& palette, int scale, const std::string& out_path) {
    if (scale < 1) throw Error("scale must be >= 1");
    const Grid& start = run.start();
    const int d = start.dim();
    if (d > 3) throw Error("rendering supports up to 3 dimensions");

    std::optional<AFilterField> af;
    if (which.a) af = a_filter(frame_window(run, t));
    const Grid frame_t = run.frame(t);

    std::vector<std::pair<int, BFilterField>> b_fields;  // (index, field) per drawable axis
    const int row_axis = d - 2;  // -1 for 1D handled below
    const int col_axis = d - 1;
    for (int i = 0; i < 3; ++i) {
        if (!which.b[i]) continue;
        if (d >= 2) b_fields.emplace_back(i, b_filter(run, t, i, row_axis));
        b_fields.emplace_back(i, b_filter(run, t, i, col_axis));
    }
    std::vector<CFilterField> c_fields;
    for (int i = 0; i < 3; ++i)
        if (which.c[i]) c_fields.push_back(c_filter(run, t, i));

    NamedImages out;
    const int n_slices = d == 3 ? start.dims()[0] : 1;
    for (int s = 0; s < n_slices; ++s) {
        const SliceView v = slice_view(start, s);
        Image img(v.cols * scale, v.rows * scale);
        for (int row = 0; row < v.rows; ++row) {
            for (int col = 0; col < v.cols; ++col) {
                const std::int64_t idx = v.index(row, col);
                Rgb fill = which.a ? af_color(palette, af->values[static_cast<std::size_t>(idx)],
                                              af->pattern[static_cast<std::size_t>(idx)], d == 3, palette.bank_dim_3d)
                                   : state_color(palette, frame_t.cell(idx));
                fill_block(img, col, row, scale, fill);
            }
        }
        for (const auto& [i, bf] : b_fields) {
            (void)i;
            for (int row = 0; row < v.rows; ++row) {
                for (int col = 0; col < v.cols; ++col) {
                    const std::int64_t idx = v.index(row, col);
                    const std::int8_t value = bf.values[static_cast<std::size_t>(idx)];
                    if (value == 0 || !bf.boundary_exists(idx)) continue;
                    const Rgb c = value > 0 ? palette.boundary_pos : palette.boundary_neg;
                    if (bf.axis == col_axis) {
                        const int x = (col + 1) * scale - 1;
                        for (int y = row * scale; y < (row + 1) * scale; ++y) img.set(x, y, c);
                    } else {
                        const int y = (row + 1) * scale - 1;
                        for (int x = col * scale; x < (col + 1) * scale; ++x) img.set(x, y, c);
                    }
                }
            }
        }
        for (const auto& cf : c_fields) {
            for (int row = 0; row < v.rows; ++row) {
                for (int col = 0; col < v.cols; ++col) {
                    if (!cf.values[static_cast<std::size_t>(v.index(row, col))]) continue;
                    const int cx = col * scale + scale / 2;
                    const int cy = row * scale + scale / 2;
                    const int arm = std::max(1, scale / 4);
                    for (int k = -arm; k <= arm; ++k) {
                        const int x = cx + k, y = cy + k;
                        if (x >= col * scale && x < (col + 1) * scale) img.set(x, cy, palette.cross);
                        if (y >= row * scale && y < (row + 1) * scale) img.set(cx, y, palette.cross);
                    }
                }
            }
        }
        out.emplace_back(d == 3 ? slice_name(out_path, s) : out_path, std::move(img));
    }
    return out;
}

}  // namespace dcs
