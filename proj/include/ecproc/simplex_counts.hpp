#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ecproc/complex_rule.hpp"
#include "ecproc/point_set.hpp"
#include "ecproc/radial_law.hpp"

namespace ecproc {

/// Symmetric proximity graph in CSR form; adjacency lists are sorted.
struct NeighborGraph {
    std::size_t vertex_count = 0;
    std::vector<std::size_t> offsets{0};
    std::vector<std::uint32_t> neighbors;
    /// Critical scale of each adjacency entry (NaN for custom rules).
    std::vector<double> edge_scales;

    std::size_t edge_count() const noexcept { return neighbors.size() / 2; }
    std::span<const std::uint32_t> adjacent(std::size_t v) const noexcept {
        return {neighbors.data() + offsets[v], offsets[v + 1] - offsets[v]};
    }
    std::span<const double> adjacent_scales(std::size_t v) const noexcept {
        return {edge_scales.data() + offsets[v], offsets[v + 1] - offsets[v]};
    }
    bool has_edge(std::size_t u, std::size_t v) const;
};

/// Edge {i, j} iff evaluate_h(rule, t, {p_i, p_j}). Candidate pairs come from
/// a uniform spatial hash with cells of width linf_extent * t.
NeighborGraph neighbor_graph(const PointSet& points, const ComplexRule& rule, double t);

/// Points with |y| >= R (closed condition).
PointSet points_outside(const PointSet& points, double R);
inline PointSet points_outside(const PointCloud& cloud, double R) { return points_outside(cloud.points, R); }

struct EnumerationOptions {
    /// Largest simplex dimension to enumerate. Setting it marks results as
    /// truncated; the Euler characteristic then is not exact.
    std::optional<int> k_cap;
    /// Maximum number of simplices (of all dimensions) before giving up.
    std::uint64_t budget = 100'000'000;
    unsigned jobs = 1;
};

struct SimplexCounts {
    double t = 0.0;
    /// counts[k] = number of k-simplices.
    std::vector<std::uint64_t> counts;
    bool truncated = false;

    std::int64_t euler_characteristic() const noexcept;
};

/// Number of (k+1)-subsets Y with h_t(Y) = 1, for every k.
/// Rips: cliques of the neighbor graph. Cech and custom rules: cliques of
/// the neighbor graph filtered by the rule, pruning cofaces of rejected sets.
SimplexCounts simplex_counts(const PointSet& points, const ComplexRule& rule, double t,
                             const EnumerationOptions& options = {});

}  // namespace ecproc
