#include "ecproc/point_set.hpp"

#include <cmath>

#include "ecproc/errors.hpp"

namespace ecproc {

PointSet::PointSet(int dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    if (dim <= 0 || coords_.size() % static_cast<std::size_t>(dim) != 0)
        throw ConfigError("coordinate count is not a multiple of the dimension");
}

PointSet::PointSet(std::initializer_list<std::initializer_list<double>> rows) {
    for (const auto& row : rows) {
        if (dim_ == 0) dim_ = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != dim_) throw ConfigError("ragged point list");
        coords_.insert(coords_.end(), row.begin(), row.end());
    }
}

void PointSet::push_back(std::span<const double> p) {
    if (dim_ == 0) dim_ = static_cast<int>(p.size());
    if (static_cast<int>(p.size()) != dim_) throw ConfigError("point dimension mismatch");
    coords_.insert(coords_.end(), p.begin(), p.end());
}

PointSet PointSet::select(std::span<const std::size_t> indices) const {
    PointSet out(dim_);
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back((*this)[i]);
    return out;
}

PointSet PointSet::scaled(double factor) const {
    PointSet out = *this;
    for (double& x : out.coords_) x *= factor;
    return out;
}

double euclidean_norm(std::span<const double> p) noexcept {
    double s = 0.0;
    for (double x : p) s += x * x;
    return std::sqrt(s);
}

double euclidean_distance(std::span<const double> p, std::span<const double> q) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = p[i] - q[i];
        s += diff * diff;
    }
    return std::sqrt(s);
}

double chebyshev_distance(std::span<const double> p, std::span<const double> q) noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) m = std::max(m, std::abs(p[i] - q[i]));
    return m;
}

}  // namespace ecproc
