#pragma once

#include <vector>

#include "ecproc/point_set.hpp"

namespace ecproc {

struct Ball {
    std::vector<double> center;
    double radius = -1.0;  // negative for the empty ball
};

/// Smallest enclosing Euclidean ball (Welzl's move-to-front recursion over a
/// fixed pseudo-random permutation). Supports d <= 3.
Ball smallest_enclosing_ball(const PointSet& points);

/// Smallest ball having every point of `boundary` on its sphere, centered in
/// their affine hull. Returns radius < 0 for an affinely dependent set.
Ball circumscribed_ball(const PointSet& boundary);

}  // namespace ecproc
