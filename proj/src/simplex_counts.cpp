#include "ecproc/simplex_counts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "clique_walk.hpp"
#include "ecproc/errors.hpp"

namespace ecproc {

namespace {

struct CellHash {
    std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept {
        std::uint64_t h = 0x243f6a8885a308d3ULL;
        for (std::int64_t k : key) h = mix64(h ^ static_cast<std::uint64_t>(k));
        return static_cast<std::size_t>(h);
    }
};

// Pair predicate and critical scale, consistent with evaluate_h on the pair.
struct PairTest {
    const ComplexRule& rule;
    double t;
    int dim;

    bool present(std::span<const double> p, std::span<const double> q, double& scale) const {
        switch (rule.kind()) {
            case RuleKind::RipsL2:
            case RuleKind::RipsLinf: {
                const double v = rips_pair_value(rule, p, q);
                if (!(v / t <= rule.unit_threshold())) return false;
                scale = critical_scale(v, rule.unit_threshold());
                return true;
            }
            case RuleKind::Cech:
            case RuleKind::Custom: {
                PointSet pair(dim);
                pair.push_back(p);
                pair.push_back(q);
                if (!evaluate_h(rule, t, pair)) return false;
                scale = rule.kind() == RuleKind::Cech
                            ? critical_scale(simplex_value(rule, pair), critical_threshold(rule))
                            : std::numeric_limits<double>::quiet_NaN();
                return true;
            }
        }
        return false;
    }
};

}  // namespace

bool NeighborGraph::has_edge(std::size_t u, std::size_t v) const {
    const auto adj = adjacent(u);
    return std::binary_search(adj.begin(), adj.end(), static_cast<std::uint32_t>(v));
}

NeighborGraph neighbor_graph(const PointSet& points, const ComplexRule& rule, double t) {
    if (!(t >= 0.0)) throw DomainError("neighbor_graph needs t >= 0");
    if (rule.kind() == RuleKind::Cech && points.dim() > 3)
        throw UnsupportedError("Cech rule is only supported for d <= 3");
    if (points.size() > std::numeric_limits<std::uint32_t>::max())
        throw ResourceError("too many points for the neighbor graph");
    const std::size_t n = points.size();
    const int d = points.dim();
    NeighborGraph g;
    g.vertex_count = n;
    g.offsets.assign(n + 1, 0);
    if (n == 0 || t == 0.0) return g;

    const double width = rule.linf_extent() * t * (1.0 + 1e-9);
    std::unordered_map<std::vector<std::int64_t>, std::vector<std::uint32_t>, CellHash> cells;
    std::vector<std::vector<std::int64_t>> keys(n, std::vector<std::int64_t>(d));
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) keys[i][k] = static_cast<std::int64_t>(std::floor(points[i][k] / width));
        cells[keys[i]].push_back(static_cast<std::uint32_t>(i));
    }

    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
    const PairTest test{rule, t, d};
    std::vector<std::int64_t> probe(d);
    std::vector<int> offset(d, -1);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(offset.begin(), offset.end(), -1);
        while (true) {
            for (int k = 0; k < d; ++k) probe[k] = keys[i][k] + offset[k];
            if (auto it = cells.find(probe); it != cells.end()) {
                for (std::uint32_t j : it->second) {
                    if (j <= i) continue;
                    double scale = 0.0;
                    if (test.present(points[i], points[j], scale)) {
                        adj[i].emplace_back(j, scale);
                        adj[j].emplace_back(static_cast<std::uint32_t>(i), scale);
                    }
                }
            }
            int k = 0;
            while (k < d && offset[k] == 1) offset[k++] = -1;
            if (k == d) break;
            ++offset[k];
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        std::sort(adj[i].begin(), adj[i].end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        g.offsets[i + 1] = g.offsets[i] + adj[i].size();
    }
    g.neighbors.reserve(g.offsets[n]);
    g.edge_scales.reserve(g.offsets[n]);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, s] : adj[i]) {
            g.neighbors.push_back(j);
            g.edge_scales.push_back(s);
        }
    }
    return g;
}

PointSet points_outside(const PointSet& points, double R) {
    if (!(R >= 0.0)) throw DomainError("points_outside needs R >= 0");
    PointSet out(points.dim());
    for (std::size_t i = 0; i < points.size(); ++i)
        if (euclidean_norm(points[i]) >= R) out.push_back(points[i]);
    return out;
}

std::int64_t SimplexCounts::euler_characteristic() const noexcept {
    std::int64_t chi = 0;
    for (std::size_t k = 0; k < counts.size(); ++k)
        chi += (k % 2 == 0 ? 1 : -1) * static_cast<std::int64_t>(counts[k]);
    return chi;
}

namespace {

struct CountSink {
    std::vector<std::uint64_t> counts;
    void operator()(int dim, double) {
        if (counts.size() <= static_cast<std::size_t>(dim)) counts.resize(dim + 1, 0);
        ++counts[dim];
    }
};

}  // namespace

SimplexCounts simplex_counts(const PointSet& points, const ComplexRule& rule, double t,
                             const EnumerationOptions& options) {
    if (!(t >= 0.0)) throw DomainError("simplex_counts needs t >= 0");
    if (options.k_cap && *options.k_cap < 0) throw ConfigError("k_cap must be non-negative");
    SimplexCounts result;
    result.t = t;
    result.truncated = options.k_cap.has_value();
    result.counts.assign(1, 0);
    if (points.empty()) return result;

    const NeighborGraph graph = neighbor_graph(points, rule, t);
    auto sinks = detail::walk_all<CountSink>(points, rule, graph, t, options, [] { return CountSink{}; });
    for (const auto& s : sinks) {
        if (s.counts.size() > result.counts.size()) result.counts.resize(s.counts.size(), 0);
        for (std::size_t k = 0; k < s.counts.size(); ++k) result.counts[k] += s.counts[k];
    }
    return result;
}

}  // namespace ecproc
