#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ecproc/complex_rule.hpp"
#include "ecproc/point_set.hpp"

namespace ecproc::oracle {

// Slow reference implementations that share no code with the neighbor
// search or the clique walk. Intended for small inputs (n <= 20).

/// Smallest enclosing ball radius by trying every support set of at most
/// d + 1 points and keeping the smallest ball that contains all points.
double brute_force_miniball_radius(const PointSet& points);

/// h_t computed from first principles: pairwise diameter for Rips rules,
/// brute-force miniball for Cech, the raw indicator for custom rules.
bool reference_h(const ComplexRule& rule, double t, const PointSet& simplex);

/// counts[k] over all (k+1)-subsets, by exhaustive subset enumeration.
std::vector<std::uint64_t> subset_counts(const PointSet& points, const ComplexRule& rule, double t);

/// Sum over non-empty subsets Y of (-1)^{|Y|-1} h_t(Y).
std::int64_t subset_euler(const PointSet& points, const ComplexRule& rule, double t);

/// Sorted edge list {i < j} from the O(n^2) pairwise check.
std::vector<std::pair<std::size_t, std::size_t>> all_pairs_edges(const PointSet& points, const ComplexRule& rule,
                                                                 double t);

struct SuiteReport {
    std::size_t clouds = 0;
    std::size_t comparisons = 0;
    std::size_t failures = 0;
    std::vector<std::string> messages;  // first few mismatches
    bool ok() const noexcept { return failures == 0 && comparisons > 0; }
};

/// Compares ec_at, simplex_counts and neighbor_graph against the references
/// on `trials` seeded clouds of at most `max_n` exterior points, for the
/// RipsL2, RipsLinf and Cech rules at five scales each.
SuiteReport run_suite(std::size_t max_n, std::size_t trials, std::uint64_t seed);

}  // namespace ecproc::oracle
