#include "dcs/grid.hpp"

#include <sstream>

namespace dcs {

std::vector<std::uint8_t> parse_boundary_flags(std::string_view flags, int dim) {
    if (static_cast<int>(flags.size()) != dim)
        throw Error("boundary flags '" + std::string(flags) + "' do not match dimension " +
                    std::to_string(dim));
    std::vector<std::uint8_t> out(flags.size());
    for (std::size_t i = 0; i < flags.size(); ++i) {
        char f = flags[i];
        if (f == 'P')
            out[i] = 1;
        else if (f == 'O')
            out[i] = 0;
        else
            throw Error(std::string("boundary flag must be 'P' or 'O', got '") + f + "'");
    }
    return out;
}

std::string format_boundary_flags(std::span<const std::uint8_t> periodic) {
    std::string s;
    for (auto p : periodic) s += p ? 'P' : 'O';
    return s;
}

Grid::Grid(std::vector<int> dims, std::vector<std::uint8_t> periodic)
    : dims_(std::move(dims)), periodic_(std::move(periodic)) {
    if (dims_.empty()) throw Error("grid needs at least one dimension");
    if (periodic_.size() != dims_.size()) throw Error("boundary flags do not match dimension");
    std::int64_t n = 1;
    for (int e : dims_) {
        if (e <= 0) throw Error("grid extents must be positive");
        n *= e;
    }
    cells_.assign(static_cast<std::size_t>(n), Cell::A);
}

Grid::Grid(std::vector<int> dims)
    : Grid(dims, std::vector<std::uint8_t>(dims.size(), std::uint8_t{1})) {}

std::int64_t Grid::index(std::span<const int> coords) const {
    std::int64_t idx = 0;
    for (std::size_t j = 0; j < dims_.size(); ++j) idx = idx * dims_[j] + coords[j];
    return idx;
}

std::vector<int> Grid::coords(std::int64_t index) const {
    std::vector<int> c(dims_.size());
    for (int j = dim() - 1; j >= 0; --j) {
        c[static_cast<std::size_t>(j)] = static_cast<int>(index % dims_[static_cast<std::size_t>(j)]);
        index /= dims_[static_cast<std::size_t>(j)];
    }
    return c;
}

Cell Grid::at(std::span<const int> coords) const {
    std::int64_t idx = 0;
    for (std::size_t j = 0; j < dims_.size(); ++j) {
        int e = dims_[j];
        int c = coords[j];
        if (c < 0 || c >= e) {
            if (!periodic_[j]) return Cell::A;
            c %= e;
            if (c < 0) c += e;
        }
        idx = idx * e + c;
    }
    return cells_[static_cast<std::size_t>(idx)];
}

void Grid::set(std::span<const int> coords, Cell v) {
    std::int64_t idx = 0;
    for (std::size_t j = 0; j < dims_.size(); ++j) {
        int e = dims_[j];
        int c = coords[j];
        if (c < 0 || c >= e) {
            if (!periodic_[j]) throw Error("set() out of range on an open axis");
            c %= e;
            if (c < 0) c += e;
        }
        idx = idx * e + c;
    }
    cells_[static_cast<std::size_t>(idx)] = v;
}

std::vector<std::string> Grid::to_rows() const {
    const int w = dims_.back();
    const std::int64_t n_rows = size() / w;
    std::vector<std::string> rows;
    rows.reserve(static_cast<std::size_t>(n_rows));
    for (std::int64_t r = 0; r < n_rows; ++r) {
        std::string line(static_cast<std::size_t>(w), 'A');
        for (int x = 0; x < w; ++x) line[static_cast<std::size_t>(x)] = to_char(cells_[static_cast<std::size_t>(r * w + x)]);
        rows.push_back(std::move(line));
    }
    return rows;
}

std::string Grid::to_text() const {
    std::ostringstream os;
    os << "DCS1 " << dim() << ' ';
    for (std::size_t j = 0; j < dims_.size(); ++j) {
        if (j) os << 'x';
        os << dims_[j];
    }
    os << ' ' << format_boundary_flags(periodic_) << '\n';
    const auto rows = to_rows();
    // group rows into slices along axis 0 for d >= 3
    std::int64_t rows_per_slice = static_cast<std::int64_t>(rows.size());
    if (dim() >= 3) rows_per_slice /= dims_[0];
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r > 0 && dim() >= 3 && static_cast<std::int64_t>(r) % rows_per_slice == 0) os << '\n';
        os << rows[r] << '\n';
    }
    return os.str();
}

Grid Grid::from_rows(const std::vector<int>& dims, std::string_view boundary,
                     const std::vector<std::string>& rows) {
    Grid g(dims, parse_boundary_flags(boundary, static_cast<int>(dims.size())));
    const int w = dims.back();
    const std::int64_t n_rows = g.size() / w;
    if (static_cast<std::int64_t>(rows.size()) != n_rows)
        throw Error("expected " + std::to_string(n_rows) + " rows, got " + std::to_string(rows.size()));
    for (std::int64_t r = 0; r < n_rows; ++r) {
        const auto& line = rows[static_cast<std::size_t>(r)];
        if (static_cast<int>(line.size()) != w)
            throw Error("row " + std::to_string(r + 1) + " has length " + std::to_string(line.size()) +
                        ", expected " + std::to_string(w));
        for (int x = 0; x < w; ++x) g.cells_[static_cast<std::size_t>(r * w + x)] = cell_from_char(line[static_cast<std::size_t>(x)]);
    }
    return g;
}

Grid Grid::parse(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string header;
    if (!std::getline(is, header)) throw Error("empty grid file");
    std::istringstream hs(header);
    std::string magic, extents, flags;
    int d = 0;
    if (!(hs >> magic >> d >> extents >> flags) || magic != "DCS1")
        throw Error("grid header must be 'DCS1 <d> <e1>x<e2>... <flags>', got '" + header + "'");
    if (d < 1) throw Error("grid dimension must be >= 1");
    std::vector<int> dims;
    std::size_t pos = 0;
    while (pos <= extents.size()) {
        std::size_t next = extents.find('x', pos);
        std::string tok = extents.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        try {
            dims.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw Error("bad extent '" + tok + "' in grid header");
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (static_cast<int>(dims.size()) != d)
        throw Error("grid header declares dimension " + std::to_string(d) + " but lists " +
                    std::to_string(dims.size()) + " extents");
    std::vector<std::string> rows;
    std::string line;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    try {
        return from_rows(dims, flags, rows);
    } catch (const Error& e) {
        throw Error(std::string(e.what()) + " (grid body ending at line " + std::to_string(lineno) + ")");
    }
}

StateCounts count_states(const Grid& g) {
    StateCounts n;
    for (Cell c : g.cells()) {
        if (c == Cell::A)
            ++n.a;
        else if (c == Cell::B)
            ++n.b;
        else
            ++n.c;
    }
    return n;
}

Grid transliterate(const Grid& g) {
    Grid out = g;
    for (std::int64_t i = 0; i < out.size(); ++i) out.set_cell(i, transliterate(out.cell(i)));
    return out;
}

std::uint64_t grid_checksum(const Grid& g) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t byte) {
        h ^= byte & 0xff;
        h *= 0x100000001b3ULL;
    };
    for (int e : g.dims())
        for (int s = 0; s < 32; s += 8) mix(static_cast<std::uint64_t>(e) >> s);
    for (auto p : g.periodic_flags()) mix(p);
    for (Cell c : g.cells()) mix(static_cast<std::uint64_t>(c));
    return h;
}

}  // namespace dcs
