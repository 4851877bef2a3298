#include "ecproc/miniball.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecproc/errors.hpp"
#include "ecproc/rng.hpp"

namespace ecproc {

namespace {

constexpr int kMaxDim = 3;

struct Welzl {
    const PointSet& pts;
    std::vector<std::size_t> order;
    int d;

    bool contains(const Ball& b, std::span<const double> p) const {
        if (b.radius < 0.0) return false;
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
            const double diff = p[k] - b.center[k];
            s += diff * diff;
        }
        return s <= b.radius * b.radius * (1.0 + 1e-12);
    }

    Ball boundary_ball(const std::vector<std::size_t>& support) const {
        if (support.empty()) return Ball{std::vector<double>(d, 0.0), -1.0};
        Ball b = circumscribed_ball(pts.select(support));
        if (b.radius >= 0.0) return b;
        // Affinely dependent support (numerically degenerate): fall back to
        // the widest pair, which encloses collinear supports.
        double best = -1.0;
        for (std::size_t i = 0; i < support.size(); ++i) {
            for (std::size_t j = i + 1; j < support.size(); ++j) {
                const double dist = euclidean_distance(pts[support[i]], pts[support[j]]);
                if (dist > best) {
                    best = dist;
                    b.center.assign(d, 0.0);
                    for (int k = 0; k < d; ++k)
                        b.center[k] = 0.5 * (pts[support[i]][k] + pts[support[j]][k]);
                    b.radius = 0.5 * dist;
                }
            }
        }
        return b;
    }

    Ball solve(std::size_t n, std::vector<std::size_t>& support) const {
        if (n == 0 || static_cast<int>(support.size()) == d + 1) return boundary_ball(support);
        const std::size_t p = order[n - 1];
        Ball b = solve(n - 1, support);
        if (contains(b, pts[p])) return b;
        support.push_back(p);
        b = solve(n - 1, support);
        support.pop_back();
        return b;
    }
};

}  // namespace

Ball circumscribed_ball(const PointSet& boundary) {
    const int d = boundary.dim();
    const std::size_t m = boundary.size();
    if (m == 0) return Ball{std::vector<double>(d, 0.0), -1.0};
    const auto p0 = boundary[0];
    if (m == 1) return Ball{std::vector<double>(p0.begin(), p0.end()), 0.0};
    if (static_cast<int>(m) > d + 1) return Ball{std::vector<double>(d, 0.0), -1.0};

    // Center p0 + sum_j lambda_j q_j with q_j = p_j - p0 and
    // q_j . (c - p0) = |q_j|^2 / 2.
    const std::size_t r = m - 1;
    std::vector<std::vector<double>> q(r, std::vector<double>(d));
    for (std::size_t j = 0; j < r; ++j)
        for (int k = 0; k < d; ++k) q[j][k] = boundary[j + 1][k] - p0[k];

    std::vector<std::vector<double>> A(r, std::vector<double>(r + 1));
    double scale = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t l = 0; l < r; ++l) {
            double dot = 0.0;
            for (int k = 0; k < d; ++k) dot += q[j][k] * q[l][k];
            A[j][l] = dot;
        }
        A[j][r] = 0.5 * A[j][j];
        scale = std::max(scale, A[j][j]);
    }
    if (scale == 0.0) return Ball{std::vector<double>(p0.begin(), p0.end()), 0.0};

    // Gaussian elimination with partial pivoting on the (tiny) Gram system.
    for (std::size_t col = 0; col < r; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < r; ++row)
            if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
        if (std::abs(A[piv][col]) <= 1e-12 * scale) return Ball{std::vector<double>(d, 0.0), -1.0};
        std::swap(A[col], A[piv]);
        for (std::size_t row = 0; row < r; ++row) {
            if (row == col) continue;
            const double factor = A[row][col] / A[col][col];
            for (std::size_t c = col; c <= r; ++c) A[row][c] -= factor * A[col][c];
        }
    }
    Ball b{std::vector<double>(p0.begin(), p0.end()), 0.0};
    for (std::size_t j = 0; j < r; ++j) {
        const double lambda = A[j][r] / A[j][j];
        for (int k = 0; k < d; ++k) b.center[k] += lambda * q[j][k];
    }
    b.radius = euclidean_distance(b.center, p0);
    return b;
}

Ball smallest_enclosing_ball(const PointSet& points) {
    const int d = points.dim();
    if (d > kMaxDim)
        throw UnsupportedError("smallest enclosing ball is only supported for d <= 3");
    Welzl w{points, {}, d};
    w.order.resize(points.size());
    std::iota(w.order.begin(), w.order.end(), std::size_t{0});
    // Fixed permutation keeps the result reproducible.
    CounterRng rng(0x6d696e6962616c6cULL, points.size());
    for (std::size_t i = w.order.size(); i > 1; --i) std::swap(w.order[i - 1], w.order[rng() % i]);
    std::vector<std::size_t> support;
    support.reserve(d + 1);
    return w.solve(points.size(), support);
}

}  // namespace ecproc
