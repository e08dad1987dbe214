#include "riverdp/sparse_grid.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>

namespace riverdp {

namespace {

// Enumerate all multilevels with |l|_1 <= budget in lexicographic order.
void enumerate_levels(int dim, int budget,
                      const std::function<void(const std::array<std::uint8_t, SparseGrid::kMaxDim>&)>& fn) {
    std::array<std::uint8_t, SparseGrid::kMaxDim> lev{};
    std::function<void(int, int)> rec = [&](int d, int remaining) {
        if (d == dim) {
            fn(lev);
            return;
        }
        for (int j = 0; j <= remaining; ++j) {
            lev[d] = static_cast<std::uint8_t>(j);
            rec(d + 1, remaining - j);
        }
    };
    rec(0, budget);
}

} // namespace

SparseGrid::SparseGrid(int dim, int level) : dim_(dim), level_(level) {
    if (dim < 1 || dim > kMaxDim) {
        throw ConfigError("SparseGrid: dim must be in [1, " +
                          std::to_string(kMaxDim) + "]");
    }
    if (level < dim) throw ConfigError("SparseGrid: level must be >= dim");
    const int budget = level - dim;

    enumerate_levels(dim, budget, [&](const std::array<std::uint8_t, kMaxDim>& lev) {
        Block b;
        b.lev = lev;
        b.offset = n_points_;
        std::size_t count = 1;
        for (int d = 0; d < dim_; ++d) {
            b.dims[d] = sparse_level_size(lev[d]);
            count *= b.dims[d];
        }
        blocks_.push_back(b);
        n_points_ += count;
    });

    coords_.resize(n_points_ * dim_);
    for (const Block& b : blocks_) {
        std::size_t count = 1;
        for (int d = 0; d < dim_; ++d) count *= b.dims[d];
        std::array<std::uint32_t, kMaxDim> idx{};
        for (std::size_t p = 0; p < count; ++p) {
            for (int d = 0; d < dim_; ++d) {
                coords_[(b.offset + p) * dim_ + d] = sparse_node_1d(b.lev[d], idx[d]);
            }
            for (int d = dim_ - 1; d >= 0; --d) {  // row-major increment
                if (++idx[d] < b.dims[d]) break;
                idx[d] = 0;
            }
        }
    }
    build_lines();
}

std::array<std::uint8_t, SparseGrid::kMaxDim> SparseGrid::point_levels(
    std::size_t k) const {
    for (const Block& b : blocks_) {
        std::size_t count = 1;
        for (int d = 0; d < dim_; ++d) count *= b.dims[d];
        if (k >= b.offset && k < b.offset + count) return b.lev;
    }
    throw ConfigError("SparseGrid: point index out of range");
}

std::array<std::uint32_t, SparseGrid::kMaxDim> SparseGrid::point_indices(
    std::size_t k) const {
    for (const Block& b : blocks_) {
        std::size_t count = 1;
        for (int d = 0; d < dim_; ++d) count *= b.dims[d];
        if (k >= b.offset && k < b.offset + count) {
            std::array<std::uint32_t, kMaxDim> idx{};
            std::size_t rem = k - b.offset;
            for (int d = dim_ - 1; d >= 0; --d) {
                idx[d] = static_cast<std::uint32_t>(rem % b.dims[d]);
                rem /= b.dims[d];
            }
            return idx;
        }
    }
    throw ConfigError("SparseGrid: point index out of range");
}

double SparseGrid::min_axis_spacing() const {
    if (level_ <= dim_) {
        throw ConfigError("SparseGrid: spacing undefined for a single point");
    }
    return std::ldexp(1.0, -(level_ - dim_));
}

void SparseGrid::build_lines() {
    lines_.assign(dim_, {});
    for (int d = 0; d < dim_; ++d) {
        // Key: levels and indices of all dimensions but d.
        std::map<std::vector<std::uint32_t>, std::vector<std::pair<std::uint32_t, std::uint32_t>>>
            groups;  // key -> list of (level-layout position, point position)
        for (const Block& b : blocks_) {
            std::size_t count = 1;
            for (int dd = 0; dd < dim_; ++dd) count *= b.dims[dd];
            std::array<std::uint32_t, kMaxDim> idx{};
            for (std::size_t p = 0; p < count; ++p) {
                std::vector<std::uint32_t> key;
                key.reserve(2 * (dim_ - 1));
                for (int dd = 0; dd < dim_; ++dd) {
                    if (dd == d) continue;
                    key.push_back(b.lev[dd]);
                    key.push_back(idx[dd]);
                }
                const std::uint32_t slot = sparse_level_offset(b.lev[d]) + idx[d];
                groups[key].emplace_back(slot, static_cast<std::uint32_t>(b.offset + p));
                for (int dd = dim_ - 1; dd >= 0; --dd) {
                    if (++idx[dd] < b.dims[dd]) break;
                    idx[dd] = 0;
                }
            }
        }
        lines_[d].reserve(groups.size());
        for (auto& [key, nodes] : groups) {
            std::sort(nodes.begin(), nodes.end());
            Line line;
            line.first = static_cast<std::uint32_t>(line_pos_.size());
            int m = 0;
            while (sparse_level_offset(m + 1) < nodes.size()) ++m;
            if (sparse_level_offset(m + 1) != nodes.size()) {
                throw NumericError("SparseGrid: incomplete hierarchization line");
            }
            line.max_level = m;
            for (const auto& [slot, pos] : nodes) line_pos_.push_back(pos);
            lines_[d].push_back(line);
        }
    }
}

std::vector<double> SparseGrid::hierarchize(const std::vector<double>& nodal) const {
    if (nodal.size() != n_points_) {
        throw ConfigError("SparseGrid::hierarchize: value count mismatch");
    }
    std::vector<double> coeff = nodal;
    for (int d = 0; d < dim_; ++d) {
        for (const Line& line : lines_[d]) {
            const std::uint32_t* pos = &line_pos_[line.first];
            for (int j = 1; j <= line.max_level; ++j) {
                const std::uint32_t off = sparse_level_offset(j);
                const std::uint32_t cnt = sparse_level_size(j);
                for (std::uint32_t i = 0; i < cnt; ++i) {
                    const double x = sparse_node_1d(j, i);
                    double acc = 0.0;
                    for (int j2 = 0; j2 < j; ++j2) {
                        std::uint32_t i2;
                        double w;
                        sparse_basis_1d(j2, x, i2, w);
                        if (w != 0.0) {
                            acc += w * coeff[pos[sparse_level_offset(j2) + i2]];
                        }
                    }
                    coeff[pos[off + i]] -= acc;
                }
            }
        }
    }
    return coeff;
}

double SparseGrid::evaluate(const std::vector<double>& surpluses,
                            const double* x) const {
    if (surpluses.size() != n_points_) {
        throw ConfigError("SparseGrid::evaluate: surplus count mismatch");
    }
    double total = 0.0;
    for (const Block& b : blocks_) {
        double prod = 1.0;
        std::size_t flat = 0;
        for (int d = 0; d < dim_; ++d) {
            std::uint32_t i;
            double w;
            sparse_basis_1d(b.lev[d], x[d], i, w);
            if (w == 0.0) {
                prod = 0.0;
                break;
            }
            prod *= w;
            flat = flat * b.dims[d] + i;
        }
        if (prod != 0.0) total += prod * surpluses[b.offset + flat];
    }
    return total;
}

std::size_t SparseGrid::count_points(int dim, int level) {
    if (dim < 1) throw ConfigError("count_points: dim must be >= 1");
    if (level < dim) throw ConfigError("count_points: level must be >= dim");
    const int budget = level - dim;
    std::vector<std::size_t> ways(budget + 1, 0);
    ways[0] = 1;
    for (int d = 0; d < dim; ++d) {
        std::vector<std::size_t> next(budget + 1, 0);
        for (int s = 0; s <= budget; ++s) {
            if (ways[s] == 0) continue;
            for (int j = 0; s + j <= budget; ++j) {
                next[s + j] += ways[s] * sparse_level_size(j);
            }
        }
        ways.swap(next);
    }
    std::size_t total = 0;
    for (std::size_t w : ways) total += w;
    return total;
}

} // namespace riverdp
