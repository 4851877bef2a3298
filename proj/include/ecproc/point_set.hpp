#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ecproc {

/// Dense set of points in R^d stored row-major.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(int dim) : dim_(dim) {}
    PointSet(int dim, std::vector<double> coords);
    PointSet(std::initializer_list<std::initializer_list<double>> rows);

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    bool empty() const noexcept { return coords_.empty(); }

    std::span<const double> operator[](std::size_t i) const noexcept {
        return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<double> mutable_point(std::size_t i) noexcept {
        return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }

    void push_back(std::span<const double> p);
    void reserve(std::size_t n) { coords_.reserve(n * dim_); }

    const std::vector<double>& coords() const noexcept { return coords_; }

    /// Subset in the given index order.
    PointSet select(std::span<const std::size_t> indices) const;

    /// Every coordinate multiplied by `factor`.
    PointSet scaled(double factor) const;

    bool operator==(const PointSet&) const = default;

private:
    int dim_ = 0;
    std::vector<double> coords_;
};

double euclidean_norm(std::span<const double> p) noexcept;
double euclidean_distance(std::span<const double> p, std::span<const double> q) noexcept;
double chebyshev_distance(std::span<const double> p, std::span<const double> q) noexcept;

}  // namespace ecproc
