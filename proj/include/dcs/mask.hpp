#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcs/error.hpp"

namespace dcs {

/// Symmetric neighborhood: a set of integer offset vectors closed under the
/// full symmetry group of the d-cube. Rank is the largest absolute coordinate.
class Mask {
public:
    Mask(int dim, std::vector<std::vector<int>> offsets);

    /// Parse the mask file format; validates symmetry and the declared rank.
    static Mask parse(std::string_view text);
    std::string to_text() const;

    int dim() const { return dim_; }
    int rank() const { return rank_; }
    bool includes_center() const { return includes_center_; }
    const std::vector<std::vector<int>>& offsets() const { return offsets_; }
    std::size_t size() const { return offsets_.size(); }
    bool contains(std::span<const int> offset) const;

private:
    int dim_;
    int rank_;
    bool includes_center_;
    std::vector<std::vector<int>> offsets_;  // sorted lexicographically
};

struct ParityBalance {
    int even = 0;
    int odd = 0;
    /// Masks entirely on one chessboard color do not work as neighborhoods.
    bool one_sided() const { return even == 0 || odd == 0; }
    bool operator==(const ParityBalance&) const = default;
};

ParityBalance mask_parity_balance(const Mask& m);

struct SymmetryViolation {
    std::vector<int> offset;   // offset whose image is missing
    std::vector<int> image;    // where the group element sends it
    std::string element;       // human-readable description
};

/// nullopt when the offset set is invariant under every element of the
/// d-cube symmetry group; otherwise one violating (offset, element) pair.
std::optional<SymmetryViolation> validate_mask_symmetry(const Mask& m);

/// All coordinate permutations combined with per-axis sign flips: 8 elements
/// for d=2, 48 for d=3.
std::vector<std::pair<std::vector<int>, std::vector<int>>> hypercube_symmetries(int dim);

}  // namespace dcs
