// Hierarchical sparse grids on [0,1]^d for high-dimensional interpolation.
//
// Level convention (calibrated against the published point counts): a grid of
// level L >= d has hierarchical budget n = L - d. The 1-D hierarchy is
//   level 0: {1/2}                       (constant basis function)
//   level 1: {0, 1}                      (edge ramps 1-2x and 2x-1)
//   level j >= 2: odd multiples of 2^-j  (hats of half-width 2^-j)
// and a multilevel (l_1..l_d) is kept when l_1 + ... + l_d <= n. This gives
// 6,017 points and minimum axis spacing 2^-8 = 1/256 for (d, L) = (3, 11),
// growing as 1, 2, 2, 4, 8, ... nodes per 1-D level. The level-0 basis being
// constant makes constants exact on the whole cube, and boundary evaluation
// needs no extrapolation because the level-1 nodes sit on the faces.
#ifndef RIVERDP_SPARSE_GRID_HPP
#define RIVERDP_SPARSE_GRID_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "riverdp/errors.hpp"

namespace riverdp {

class SparseGrid {
public:
    static constexpr int kMaxDim = 8;

    SparseGrid(int dim, int level);

    int dim() const { return dim_; }
    int level() const { return level_; }
    int budget() const { return level_ - dim_; }
    std::size_t n_points() const { return n_points_; }

    // Coordinate of point k in dimension d.
    double coordinate(std::size_t k, int d) const {
        return coords_[k * dim_ + d];
    }
    std::array<std::uint8_t, kMaxDim> point_levels(std::size_t k) const;
    std::array<std::uint32_t, kMaxDim> point_indices(std::size_t k) const;

    // Smallest distance between points along any axis (level > dim).
    double min_axis_spacing() const;

    // Hierarchical surpluses from nodal values (same ordering as points).
    std::vector<double> hierarchize(const std::vector<double>& nodal) const;

    // Interpolant value at x in [0,1]^d.
    double evaluate(const std::vector<double>& surpluses, const double* x) const;

    static std::size_t count_points(int dim, int level);

private:
    struct Block {
        std::array<std::uint8_t, kMaxDim> lev;
        std::array<std::uint32_t, kMaxDim> dims;
        std::size_t offset;
    };
    // A 1-D hierarchization line: positions of the complete 1-D hierarchy
    // (levels 0..max_level) holding all other dimensions fixed.
    struct Line {
        int max_level;
        std::uint32_t first;  // offset into line_pos_ storage
    };

    int dim_;
    int level_;
    std::size_t n_points_ = 0;
    std::vector<Block> blocks_;
    std::vector<double> coords_;
    std::vector<std::vector<Line>> lines_;      // per dimension
    std::vector<std::uint32_t> line_pos_;       // shared storage for Line nodes

    void build_lines();
};

// Nodes per 1-D level: 1, 2, 2, 4, 8, ...
inline std::uint32_t sparse_level_size(int j) {
    if (j == 0) return 1;
    if (j == 1) return 2;
    return 1u << (j - 1);
}

// Cumulative node count of 1-D levels < j.
inline std::uint32_t sparse_level_offset(int j) {
    if (j == 0) return 0;
    if (j == 1) return 1;
    return 3u + ((1u << (j - 1)) - 2u);  // 1 + 2 + 2 + 4 + ... + 2^{j-2}
}

inline double sparse_node_1d(int j, std::uint32_t i) {
    if (j == 0) return 0.5;
    if (j == 1) return static_cast<double>(i);
    return (2.0 * i + 1.0) / static_cast<double>(1u << j);
}

// The single basis function of 1-D level j that can be nonzero at x;
// returns its index and weight (weight 0 if none covers x).
inline void sparse_basis_1d(int j, double x, std::uint32_t& index, double& weight) {
    if (j == 0) {
        index = 0;
        weight = 1.0;
        return;
    }
    if (j == 1) {
        if (x < 0.5) {
            index = 0;
            weight = 1.0 - 2.0 * x;
        } else {
            index = 1;
            weight = 2.0 * x - 1.0;
        }
        return;
    }
    const double scale = static_cast<double>(1u << (j - 1));
    long cell = static_cast<long>(x * scale);
    if (cell < 0) cell = 0;
    if (cell >= static_cast<long>(scale)) cell = static_cast<long>(scale) - 1;
    index = static_cast<std::uint32_t>(cell);
    const double center = (2.0 * cell + 1.0) / (2.0 * scale);
    weight = 1.0 - 2.0 * scale * std::abs(x - center);
    if (weight < 0.0) weight = 0.0;
}

} // namespace riverdp

#endif
