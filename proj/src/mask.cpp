#include "dcs/mask.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace dcs {

Mask::Mask(int dim, std::vector<std::vector<int>> offsets)
    : dim_(dim), rank_(0), includes_center_(false), offsets_(std::move(offsets)) {
    if (dim_ < 1) throw Error("mask dimension must be >= 1");
    if (offsets_.empty()) throw Error("mask has no cells");
    for (const auto& o : offsets_) {
        if (static_cast<int>(o.size()) != dim_) throw Error("mask offset arity does not match dimension");
        int m = 0;
        for (int c : o) m = std::max(m, std::abs(c));
        rank_ = std::max(rank_, m);
        if (std::all_of(o.begin(), o.end(), [](int c) { return c == 0; })) includes_center_ = true;
    }
    std::sort(offsets_.begin(), offsets_.end());
    offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
}

bool Mask::contains(std::span<const int> offset) const {
    std::vector<int> key(offset.begin(), offset.end());
    return std::binary_search(offsets_.begin(), offsets_.end(), key);
}

namespace {

// Position of an offset inside the (2r+1)^d block: content line and column.
std::pair<int, int> block_position(std::span<const int> offset, int rank) {
    const int side = 2 * rank + 1;
    int line = 0;
    for (std::size_t j = 0; j + 1 < offset.size(); ++j) line = line * side + (offset[j] + rank);
    return {line, offset.back() + rank};
}

}  // namespace

Mask Mask::parse(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    auto next_content = [&]() -> std::string {
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return line;
        }
        return {};
    };

    std::string dim_line = next_content();
    int d = 0;
    {
        std::istringstream ls(dim_line);
        std::string kw;
        if (!(ls >> kw >> d) || kw != "DIM" || d < 1)
            throw Error("mask line " + std::to_string(lineno) + ": expected 'DIM <d>', got '" + dim_line + "'");
    }
    std::string rank_line = next_content();
    int declared_rank = -1;
    {
        std::istringstream ls(rank_line);
        std::string kw;
        if (!(ls >> kw >> declared_rank) || kw != "RANK" || declared_rank < 0)
            throw Error("mask line " + std::to_string(lineno) + ": expected 'RANK <r>', got '" + rank_line + "'");
    }

    const int side = 2 * declared_rank + 1;
    std::int64_t n_lines = 1;
    for (int j = 0; j + 1 < d; ++j) n_lines *= side;

    std::vector<std::vector<int>> offsets;
    bool center = false;
    for (std::int64_t l = 0; l < n_lines; ++l) {
        std::string row = next_content();
        if (row.empty())
            throw Error("mask block truncated: expected " + std::to_string(n_lines) +
                        " rows of " + std::to_string(side) + " characters");
        if (static_cast<int>(row.size()) != side)
            throw Error("mask line " + std::to_string(lineno) + ": row has length " +
                        std::to_string(row.size()) + ", expected " + std::to_string(side) +
                        " (block must be cubic)");
        for (int x = 0; x < side; ++x) {
            char ch = row[static_cast<std::size_t>(x)];
            if (ch != '0' && ch != '1')
                throw Error("mask line " + std::to_string(lineno) + ", column " + std::to_string(x + 1) +
                            ": expected '0' or '1', got '" + std::string(1, ch) + "'");
            if (ch == '0') continue;
            std::vector<int> off(static_cast<std::size_t>(d));
            std::int64_t rest = l;
            for (int j = d - 2; j >= 0; --j) {
                off[static_cast<std::size_t>(j)] = static_cast<int>(rest % side) - declared_rank;
                rest /= side;
            }
            off[static_cast<std::size_t>(d - 1)] = x - declared_rank;
            if (std::all_of(off.begin(), off.end(), [](int c) { return c == 0; })) center = true;
            offsets.push_back(std::move(off));
        }
    }
    if (!next_content().empty())
        throw Error("mask line " + std::to_string(lineno) + ": trailing content after the block");
    if (offsets.empty()) throw Error("mask block is empty (no '1' cells)");
    (void)center;

    Mask m(d, std::move(offsets));
    if (m.rank() != declared_rank)
        throw Error("mask declares RANK " + std::to_string(declared_rank) + " but offsets have rank " +
                    std::to_string(m.rank()));
    if (auto v = validate_mask_symmetry(m)) {
        auto [bl, bc] = block_position(v->offset, declared_rank);
        throw Error("mask is not symmetric: cell at block row " + std::to_string(bl + 1) + ", column " +
                    std::to_string(bc + 1) + " has no counterpart under " + v->element);
    }
    return m;
}

std::string Mask::to_text() const {
    const int side = 2 * rank_ + 1;
    std::int64_t n_lines = 1;
    for (int j = 0; j + 1 < dim_; ++j) n_lines *= side;
    std::vector<std::string> rows(static_cast<std::size_t>(n_lines), std::string(static_cast<std::size_t>(side), '0'));
    for (const auto& o : offsets_) {
        auto [l, c] = block_position(o, rank_);
        rows[static_cast<std::size_t>(l)][static_cast<std::size_t>(c)] = '1';
    }
    std::ostringstream os;
    os << "DIM " << dim_ << "\nRANK " << rank_ << '\n';
    std::int64_t rows_per_slice = dim_ >= 3 ? n_lines / side : n_lines;
    for (std::int64_t l = 0; l < n_lines; ++l) {
        if (l > 0 && dim_ >= 3 && l % rows_per_slice == 0) os << '\n';
        os << rows[static_cast<std::size_t>(l)] << '\n';
    }
    return os.str();
}

ParityBalance mask_parity_balance(const Mask& m) {
    ParityBalance p;
    for (const auto& o : m.offsets()) {
        int s = std::accumulate(o.begin(), o.end(), 0);
        if (((s % 2) + 2) % 2 == 0)
            ++p.even;
        else
            ++p.odd;
    }
    return p;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> hypercube_symmetries(int dim) {
    std::vector<int> perm(static_cast<std::size_t>(dim));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
    do {
        for (int bits = 0; bits < (1 << dim); ++bits) {
            std::vector<int> signs(static_cast<std::size_t>(dim));
            for (int j = 0; j < dim; ++j) signs[static_cast<std::size_t>(j)] = (bits >> j) & 1 ? -1 : 1;
            out.emplace_back(perm, std::move(signs));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

std::optional<SymmetryViolation> validate_mask_symmetry(const Mask& m) {
    const int d = m.dim();
    for (const auto& [perm, signs] : hypercube_symmetries(d)) {
        for (const auto& o : m.offsets()) {
            std::vector<int> img(static_cast<std::size_t>(d));
            for (int j = 0; j < d; ++j)
                img[static_cast<std::size_t>(j)] =
                    signs[static_cast<std::size_t>(j)] * o[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
            if (!m.contains(img)) {
                std::ostringstream el;
                el << "permutation (";
                for (int j = 0; j < d; ++j) el << (j ? "," : "") << perm[static_cast<std::size_t>(j)];
                el << ") with signs (";
                for (int j = 0; j < d; ++j) el << (j ? "," : "") << (signs[static_cast<std::size_t>(j)] > 0 ? "+" : "-");
                el << ")";
                return SymmetryViolation{o, img, el.str()};
            }
        }
    }
    return std::nullopt;
}

}  // namespace dcs
