#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "ecproc/complex_rule.hpp"
#include "ecproc/radial_law.hpp"
#include "ecproc/simplex_counts.hpp"

namespace ecproc {

/// Sample path t -> chi_n(t) of the Euler characteristic of the complex on
/// the points outside B(0, R_n), on a finite grid. The path is
/// right-continuous and piecewise constant.
struct ECProcess {
    std::vector<double> t_grid;
    std::vector<std::int64_t> chi;
    /// per_k[k][j] = number of k-simplices at t_grid[j] (empty unless retained).
    std::vector<std::vector<std::uint64_t>> per_k;
    std::size_t n = 0;
    double R_n = 0.0;
    /// Denominator of the strong law (R_n^d or a(R_n) R_n^{d-1}).
    double scale = 1.0;
    std::size_t exterior_count = 0;
    bool truncated = false;

    std::vector<double> chi_scaled() const;
};

/// Exact Euler characteristic of K(points, t).
std::int64_t ec_at(const PointSet& points, const ComplexRule& rule, double t, const EnumerationOptions& options = {});

struct ProcessOptions {
    bool retain_per_k = false;
    EnumerationOptions enumeration;
};

/// chi on `t_grid` for a fixed point set. Simplices are enumerated once at the
/// largest grid scale and binned by their entry scale.
ECProcess ec_curve(const PointSet& points, const ComplexRule& rule, std::span<const double> t_grid,
                   const ProcessOptions& options = {});

/// Euler characteristic process of the cloud outside B(0, R_n). `scale` is
/// set from the cloud's law.
ECProcess ec_process(const PointCloud& cloud, const ComplexRule& rule, double R_n, std::span<const double> t_grid,
                     const ProcessOptions& options = {});

/// Sorted distinct scales at which chi can change (Rips rules only). Each
/// value is the exact entry scale of some edge.
std::vector<double> breakpoints(const PointSet& points, const ComplexRule& rule);

/// {j * step : j = 0..round(t_max / step)}.
std::vector<double> make_grid(double t_max, double step);

/// max |value| over the grid points in [a, b]. Exact for a step function
/// whose breakpoints in [a, b] all lie on the grid.
double sup_functional(std::span<const double> t_grid, std::span<const double> values, double a, double b);
/// Uses chi (scaled = false) or chi / scale (scaled = true).
double sup_functional(const ECProcess& proc, double a, double b, bool scaled = false);

/// CSV "t,chi,chi_scaled[,S0,S1,...]".
void write_process_csv(std::ostream& out, const ECProcess& proc);

}  // namespace ecproc
