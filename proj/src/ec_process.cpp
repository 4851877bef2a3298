#include "ecproc/ec_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "clique_walk.hpp"
#include "ecproc/errors.hpp"
#include "ecproc/io.hpp"

namespace ecproc {

namespace {

struct ChiSink {
    std::int64_t chi = 0;
    void operator()(int dim, double) { chi += (dim % 2 == 0) ? 1 : -1; }
};

// Per-dimension counts binned by the first grid index at which a simplex is
// present.
struct BinSink {
    std::span<const double> grid;
    std::vector<std::vector<std::uint64_t>> bins;

    void operator()(int dim, double scale) {
        const auto it = std::lower_bound(grid.begin(), grid.end(), scale);
        if (it == grid.end()) return;
        if (bins.size() <= static_cast<std::size_t>(dim))
            bins.resize(dim + 1, std::vector<std::uint64_t>(grid.size(), 0));
        ++bins[dim][static_cast<std::size_t>(it - grid.begin())];
    }
};

void check_grid(std::span<const double> grid) {
    if (grid.empty()) throw DomainError("t grid is empty");
    if (!(grid.front() >= 0.0)) throw DomainError("t grid must be non-negative");
    for (std::size_t j = 1; j < grid.size(); ++j)
        if (!(grid[j] > grid[j - 1])) throw DomainError("t grid must be strictly increasing");
}

}  // namespace

std::vector<double> ECProcess::chi_scaled() const {
    std::vector<double> out(chi.size());
    for (std::size_t j = 0; j < chi.size(); ++j) out[j] = static_cast<double>(chi[j]) / scale;
    return out;
}

std::int64_t ec_at(const PointSet& points, const ComplexRule& rule, double t, const EnumerationOptions& options) {
    if (!(t >= 0.0)) throw DomainError("ec_at needs t >= 0");
    if (points.empty()) return 0;
    EnumerationOptions opts = options;
    opts.k_cap.reset();
    const NeighborGraph graph = neighbor_graph(points, rule, t);
    auto sinks = detail::walk_all<ChiSink>(points, rule, graph, t, opts, [] { return ChiSink{}; });
    std::int64_t chi = 0;
    for (const auto& s : sinks) chi += s.chi;
    return chi;
}

ECProcess ec_curve(const PointSet& points, const ComplexRule& rule, std::span<const double> t_grid,
                   const ProcessOptions& options) {
    check_grid(t_grid);
    ECProcess proc;
    proc.t_grid.assign(t_grid.begin(), t_grid.end());
    proc.exterior_count = points.size();
    proc.truncated = options.enumeration.k_cap.has_value();
    const std::size_t G = t_grid.size();
    proc.chi.assign(G, 0);

    std::vector<std::vector<std::uint64_t>> per_k;
    if (rule.kind() == RuleKind::Custom) {
        // No closed-form entry scale: enumerate at every grid value.
        for (std::size_t j = 0; j < G; ++j) {
            const SimplexCounts c = simplex_counts(points, rule, t_grid[j], options.enumeration);
            if (per_k.size() < c.counts.size()) per_k.resize(c.counts.size(), std::vector<std::uint64_t>(G, 0));
            for (std::size_t k = 0; k < c.counts.size(); ++k) per_k[k][j] = c.counts[k];
        }
    } else if (!points.empty()) {
        const double t_max = t_grid.back();
        const NeighborGraph graph = neighbor_graph(points, rule, t_max);
        auto sinks = detail::walk_all<BinSink>(points, rule, graph, t_max, options.enumeration,
                                               [&] { return BinSink{t_grid, {}}; });
        for (const auto& s : sinks) {
            if (per_k.size() < s.bins.size()) per_k.resize(s.bins.size(), std::vector<std::uint64_t>(G, 0));
            for (std::size_t k = 0; k < s.bins.size(); ++k)
                for (std::size_t j = 0; j < G; ++j) per_k[k][j] += s.bins[k][j];
        }
        for (auto& row : per_k)
            for (std::size_t j = 1; j < G; ++j) row[j] += row[j - 1];
    }
    if (per_k.empty()) per_k.assign(1, std::vector<std::uint64_t>(G, 0));

    for (std::size_t k = 0; k < per_k.size(); ++k)
        for (std::size_t j = 0; j < G; ++j)
            proc.chi[j] += (k % 2 == 0 ? 1 : -1) * static_cast<std::int64_t>(per_k[k][j]);
    if (options.retain_per_k) proc.per_k = std::move(per_k);
    return proc;
}

ECProcess ec_process(const PointCloud& cloud, const ComplexRule& rule, double R_n, std::span<const double> t_grid,
                     const ProcessOptions& options) {
    if (!(R_n > 0.0)) throw DomainError("ec_process needs R_n > 0");
    ECProcess proc = ec_curve(points_outside(cloud.points, R_n), rule, t_grid, options);
    proc.n = cloud.n;
    proc.R_n = R_n;
    proc.scale = scaling_denominator(cloud.law, R_n);
    return proc;
}

std::vector<double> breakpoints(const PointSet& points, const ComplexRule& rule) {
    if (!rule.is_rips()) throw UnsupportedError("breakpoints are only available for Rips rules");
    std::vector<double> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            out.push_back(critical_scale(rips_pair_value(rule, points[i], points[j]), rule.unit_threshold()));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> make_grid(double t_max, double step) {
    if (!(t_max > 0.0) || !(step > 0.0) || !std::isfinite(t_max)) throw ConfigError("grid needs t_max > 0 and step > 0");
    const auto J = static_cast<std::size_t>(std::llround(t_max / step));
    std::vector<double> grid(J + 1);
    for (std::size_t j = 0; j <= J; ++j) grid[j] = static_cast<double>(j) * step;
    return grid;
}

double sup_functional(std::span<const double> t_grid, std::span<const double> values, double a, double b) {
    if (!(a >= 0.0 && a < b)) throw DomainError("sup_functional needs 0 <= a < b");
    if (t_grid.size() != values.size() || t_grid.empty()) throw DomainError("grid and values differ in length");
    const double tol = 1e-9 * std::max(1.0, std::abs(b));
    if (a < t_grid.front() - tol || b > t_grid.back() + tol)
        throw DomainError("[a, b] is not covered by the grid");
    double best = -1.0;
    for (std::size_t j = 0; j < t_grid.size(); ++j)
        if (t_grid[j] >= a - tol && t_grid[j] <= b + tol) best = std::max(best, std::abs(values[j]));
    if (best < 0.0) throw DomainError("no grid point in [a, b]");
    return best;
}

double sup_functional(const ECProcess& proc, double a, double b, bool scaled) {
    std::vector<double> values;
    if (scaled) {
        values = proc.chi_scaled();
    } else {
        values.assign(proc.chi.begin(), proc.chi.end());
    }
    return sup_functional(proc.t_grid, values, a, b);
}

void write_process_csv(std::ostream& out, const ECProcess& proc) {
    out << "t,chi,chi_scaled";
    for (std::size_t k = 0; k < proc.per_k.size(); ++k) out << ",S" << k;
    out << '\n';
    const auto scaled = proc.chi_scaled();
    for (std::size_t j = 0; j < proc.t_grid.size(); ++j) {
        out << format_double(proc.t_grid[j]) << ',' << proc.chi[j] << ',' << format_double(scaled[j]);
        for (const auto& row : proc.per_k) out << ',' << row[j];
        out << '\n';
    }
}

}  // namespace ecproc
