#pragma once

// Ordered depth-first clique enumeration shared by simplex counting and the
// Euler characteristic process. Each simplex is visited exactly once, as an
// increasing vertex sequence, together with the scale at which it enters the
// filtration.

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "ecproc/complex_rule.hpp"
#include "ecproc/errors.hpp"
#include "ecproc/simplex_counts.hpp"

namespace ecproc::detail {

struct Candidate {
    std::uint32_t vertex;
    double scale;  // max critical scale of edges to the current clique
};

class SimplexBudget {
public:
    explicit SimplexBudget(std::uint64_t limit) : limit_(limit) {}

    void charge(std::uint64_t n) {
        if (used_.fetch_add(n, std::memory_order_relaxed) + n > limit_) exceeded();
    }

private:
    [[noreturn]] void exceeded() const {
        throw ResourceError("simplex budget of " + std::to_string(limit_) +
                            " exceeded; use a larger R or a smaller t");
    }

    std::uint64_t limit_;
    std::atomic<std::uint64_t> used_{0};
};

/// Walks all simplices present at scale `t_limit` whose vertex sequence
/// starts at a root in `roots`. `emit(dim, scale)` receives the dimension and
/// the entry scale (NaN for custom rules).
template <class Emit>
class CliqueWalker {
public:
    CliqueWalker(const PointSet& points, const ComplexRule& rule, const NeighborGraph& graph, double t_limit,
                 std::optional<int> k_cap, SimplexBudget& budget, Emit& emit)
        : points_(points), rule_(rule), graph_(graph), t_limit_(t_limit), k_cap_(k_cap), budget_(budget),
          emit_(emit) {
        if (rule.kind() != RuleKind::Custom) threshold_ = critical_threshold(rule);
    }

    void walk_root(std::uint32_t v) {
        clique_.assign(1, v);
        emit_(0, 0.0);
        count(1);
        if (k_cap_ && *k_cap_ < 1) return;
        auto& cands = level(0);
        cands.clear();
        const auto adj = graph_.adjacent(v);
        const auto scales = graph_.adjacent_scales(v);
        for (std::size_t i = 0; i < adj.size(); ++i)
            if (adj[i] > v) cands.push_back({adj[i], scales[i]});
        if (!cands.empty()) extend(0, 0.0);
    }

private:
    std::vector<Candidate>& level(std::size_t depth) {
        if (levels_.size() <= depth) levels_.resize(depth + 1);
        return levels_[depth];
    }

    void count(std::uint64_t n) {
        pending_ += n;
        if (pending_ >= 4096) flush();
    }

public:
    void flush() {
        if (pending_ == 0) return;
        const std::uint64_t n = pending_;
        pending_ = 0;
        budget_.charge(n);
    }

private:
    // Entry scale of clique_ (already containing the new vertex), or +inf if
    // the set is not a simplex at t_limit.
    double accept(double parent_scale, double edge_scale) {
        switch (rule_.kind()) {
            case RuleKind::RipsL2:
            case RuleKind::RipsLinf: return std::max(parent_scale, edge_scale);
            case RuleKind::Cech: {
                const PointSet simplex = points_.select(std::span<const std::size_t>(to_size(clique_)));
                const double s = std::max(parent_scale, critical_scale(simplex_value(rule_, simplex), threshold_));
                return s <= t_limit_ ? s : std::numeric_limits<double>::infinity();
            }
            case RuleKind::Custom: {
                const PointSet simplex = points_.select(std::span<const std::size_t>(to_size(clique_)));
                return evaluate_h(rule_, t_limit_, simplex) ? std::numeric_limits<double>::quiet_NaN()
                                                            : std::numeric_limits<double>::infinity();
            }
        }
        return std::numeric_limits<double>::infinity();
    }

    const std::vector<std::size_t>& to_size(const std::vector<std::uint32_t>& c) {
        index_buf_.assign(c.begin(), c.end());
        return index_buf_;
    }

    void extend(std::size_t depth, double parent_scale) {
        const std::size_t n_cands = levels_[depth].size();
        for (std::size_t i = 0; i < n_cands; ++i) {
            const Candidate cand = levels_[depth][i];
            clique_.push_back(cand.vertex);
            const double scale = accept(parent_scale, cand.scale);
            if (std::isinf(scale)) {
                clique_.pop_back();
                continue;
            }
            const int dim = static_cast<int>(clique_.size()) - 1;
            emit_(dim, scale);
            count(1);
            if (!k_cap_ || dim < *k_cap_) {
                auto& next = level(depth + 1);
                next.clear();
                const auto& cands = levels_[depth];
                const auto adj = graph_.adjacent(cand.vertex);
                const auto scales = graph_.adjacent_scales(cand.vertex);
                std::size_t a = i + 1, b = 0;
                while (a < n_cands && b < adj.size()) {
                    if (cands[a].vertex < adj[b]) {
                        ++a;
                    } else if (adj[b] < cands[a].vertex) {
                        ++b;
                    } else {
                        next.push_back({adj[b], std::max(cands[a].scale, scales[b])});
                        ++a;
                        ++b;
                    }
                }
                if (!next.empty()) extend(depth + 1, scale);
            }
            clique_.pop_back();
        }
    }

    const PointSet& points_;
    const ComplexRule& rule_;
    const NeighborGraph& graph_;
    double t_limit_;
    std::optional<int> k_cap_;
    SimplexBudget& budget_;
    Emit& emit_;
    double threshold_ = 0.0;
    std::vector<std::uint32_t> clique_;
    std::vector<std::size_t> index_buf_;
    std::vector<std::vector<Candidate>> levels_;
    std::uint64_t pending_ = 0;
};

/// Runs the walk over all roots with `jobs` workers. `make_sink()` creates a
/// per-worker sink callable as sink(dim, scale); sinks are returned in
/// worker order for the caller to merge.
template <class Sink, class MakeSink>
std::vector<Sink> walk_all(const PointSet& points, const ComplexRule& rule, const NeighborGraph& graph,
                           double t_limit, const EnumerationOptions& options, MakeSink make_sink) {
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, std::max<std::size_t>(1, graph.vertex_count)));
    SimplexBudget budget(options.budget);
    std::vector<Sink> sinks;
    sinks.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) sinks.push_back(make_sink());

    auto work = [&](unsigned j) {
        CliqueWalker<Sink> walker(points, rule, graph, t_limit, options.k_cap, budget, sinks[j]);
        for (std::size_t v = j; v < graph.vertex_count; v += jobs) walker.walk_root(static_cast<std::uint32_t>(v));
        walker.flush();
    };

    if (jobs == 1) {
        work(0);
        return sinks;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(jobs);
    for (unsigned j = 0; j < jobs; ++j) {
        threads.emplace_back([&, j] {
            try {
                work(j);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return sinks;
}

}  // namespace ecproc::detail
