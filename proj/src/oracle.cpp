#include "ecproc/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "ecproc/ec_process.hpp"
#include "ecproc/errors.hpp"
#include "ecproc/miniball.hpp"
#include "ecproc/rng.hpp"
#include "ecproc/simplex_counts.hpp"

namespace ecproc::oracle {

namespace {

constexpr std::size_t kMaxPoints = 20;

double diameter(const PointSet& points, bool linf) {
    double diam = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            diam = std::max(diam, linf ? chebyshev_distance(points[i], points[j])
                                       : euclidean_distance(points[i], points[j]));
    return diam;
}

PointSet subset(const PointSet& points, std::uint32_t mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (mask >> i & 1U) idx.push_back(i);
    return points.select(idx);
}

// Indicator value for every subset mask; faces are checked first so that
// expensive tests only run on candidates whose boundary is present.
std::vector<char> subset_table(const PointSet& points, const ComplexRule& rule, double t) {
    const std::size_t n = points.size();
    if (n > kMaxPoints) throw ResourceError("subset oracle is limited to 20 points");
    const std::uint32_t full = n == 0 ? 0U : (1U << n) - 1U;
    std::vector<char> table(static_cast<std::size_t>(full) + 1, 0);
    for (std::uint32_t mask = 1; mask <= full && mask != 0; ++mask) {
        bool faces = true;
        if (std::popcount(mask) > 1)
            for (std::uint32_t rest = mask; rest != 0 && faces; rest &= rest - 1)
                faces = table[mask & ~(rest & -rest)] != 0;
        // A set whose faces are missing is not a simplex for any rule
        // satisfying monotonicity; the reference still evaluates it for
        // Rips so that the shortcut is checked rather than assumed.
        if (!faces && rule.kind() != RuleKind::RipsL2 && rule.kind() != RuleKind::RipsLinf) continue;
        table[mask] = reference_h(rule, t, subset(points, mask)) ? 1 : 0;
    }
    return table;
}

}  // namespace

double brute_force_miniball_radius(const PointSet& points) {
    const std::size_t n = points.size();
    const int d = points.dim();
    if (n == 0) return -1.0;
    if (n > kMaxPoints) throw ResourceError("brute-force miniball is limited to 20 points");
    double best = std::numeric_limits<double>::infinity();
    const std::uint32_t full = (1U << n) - 1U;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        if (std::popcount(mask) > d + 1) continue;
        const Ball ball = circumscribed_ball(subset(points, mask));
        if (ball.radius < 0.0 || ball.radius >= best) continue;
        bool encloses = true;
        for (std::size_t i = 0; i < n && encloses; ++i) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                const double diff = points[i][k] - ball.center[k];
                s += diff * diff;
            }
            encloses = s <= ball.radius * ball.radius * (1.0 + 1e-12);
        }
        if (encloses) best = ball.radius;
    }
    return best;
}

bool reference_h(const ComplexRule& rule, double t, const PointSet& simplex) {
    if (simplex.size() == 1) return true;
    if (t == 0.0) return false;
    const double w = rule.unit_threshold();
    switch (rule.kind()) {
        case RuleKind::RipsL2: return diameter(simplex, false) / t <= w;
        case RuleKind::RipsLinf: return diameter(simplex, true) / t <= w;
        case RuleKind::Cech:
            if (simplex.dim() > 3) throw UnsupportedError("Cech rule is only supported for d <= 3");
            return brute_force_miniball_radius(simplex) / t <= w / 2;
        case RuleKind::Custom: return rule.indicator()(simplex.scaled(1.0 / t));
    }
    return false;
}

std::vector<std::uint64_t> subset_counts(const PointSet& points, const ComplexRule& rule, double t) {
    const auto table = subset_table(points, rule, t);
    std::vector<std::uint64_t> counts(points.size(), 0);
    for (std::size_t mask = 1; mask < table.size(); ++mask)
        if (table[mask]) ++counts[std::popcount(static_cast<std::uint32_t>(mask)) - 1];
    while (!counts.empty() && counts.back() == 0) counts.pop_back();
    return counts;
}

std::int64_t subset_euler(const PointSet& points, const ComplexRule& rule, double t) {
    const auto table = subset_table(points, rule, t);
    std::int64_t chi = 0;
    for (std::size_t mask = 1; mask < table.size(); ++mask)
        if (table[mask]) chi += std::popcount(static_cast<std::uint32_t>(mask)) % 2 == 1 ? 1 : -1;
    return chi;
}

std::vector<std::pair<std::size_t, std::size_t>> all_pairs_edges(const PointSet& points, const ComplexRule& rule,
                                                                 double t) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const std::size_t idx[2] = {i, j};
            if (reference_h(rule, t, points.select(idx))) edges.emplace_back(i, j);
        }
    return edges;
}

SuiteReport run_suite(std::size_t max_n, std::size_t trials, std::uint64_t seed) {
    if (max_n < 1 || max_n > kMaxPoints) throw ConfigError("oracle max_n must be in [1, 20]");
    SuiteReport report;
    const ComplexRule rules[] = {ComplexRule::rips_l2(1.0), ComplexRule::rips_linf(1.0 / std::sqrt(2.0)),
                                 ComplexRule::cech(1.0)};
    const double scales[] = {0.25, 0.5, 0.8, 1.2, 2.0};

    auto mismatch = [&](const std::string& what) {
        ++report.failures;
        if (report.messages.size() < 10) report.messages.push_back(what);
    };

    for (std::size_t trial = 0; trial < trials; ++trial) {
        CounterRng rng(mix64(seed), trial);
        const int d = trial % 2 == 0 ? 2 : 3;
        // Points in a thin shell around radius 2, mimicking the sparse
        // exterior of a sample; keep those outside radius 1.5.
        const std::size_t m = 1 + rng() % (2 * max_n);
        PointSet cloud(d);
        std::vector<double> p(d);
        for (std::size_t i = 0; i < m; ++i) {
            for (double& x : p) x = rng.uniform(-2.5, 2.5);
            cloud.push_back(p);
        }
        PointSet points = points_outside(cloud, 1.5);
        if (points.size() > max_n) {
            std::vector<std::size_t> keep(max_n);
            for (std::size_t i = 0; i < max_n; ++i) keep[i] = i;
            points = points.select(keep);
        }
        ++report.clouds;

        for (const auto& rule : rules) {
            for (double t : scales) {
                std::ostringstream tag;
                tag << "trial " << trial << " " << to_string(rule.kind()) << " t=" << t << " n=" << points.size();

                const std::int64_t expected = subset_euler(points, rule, t);
                const std::int64_t actual = ec_at(points, rule, t);
                ++report.comparisons;
                if (expected != actual) {
                    std::ostringstream os;
                    os << tag.str() << ": ec_at " << actual << " vs oracle " << expected;
                    mismatch(os.str());
                }

                auto counts = simplex_counts(points, rule, t).counts;
                while (!counts.empty() && counts.back() == 0) counts.pop_back();
                ++report.comparisons;
                if (counts != subset_counts(points, rule, t)) mismatch(tag.str() + ": simplex counts differ");

                std::vector<std::pair<std::size_t, std::size_t>> edges;
                if (!points.empty()) {
                    const NeighborGraph graph = neighbor_graph(points, rule, t);
                    for (std::size_t u = 0; u < graph.vertex_count; ++u)
                        for (std::uint32_t v : graph.adjacent(u))
                            if (u < v) edges.emplace_back(u, v);
                }
                ++report.comparisons;
                if (edges != all_pairs_edges(points, rule, t)) mismatch(tag.str() + ": neighbor graph differs");
            }
        }
    }
    return report;
}

}  // namespace ecproc::oracle
