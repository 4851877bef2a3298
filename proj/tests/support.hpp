#pragma once

#include <cstdint>

#include "ecproc/point_set.hpp"
#include "ecproc/rng.hpp"

namespace testing {

// m points uniform in [lo, hi]^d from a dedicated stream.
inline ecproc::PointSet uniform_points(std::size_t m, int d, double lo, double hi, std::uint64_t seed,
                                       std::uint64_t stream = 0) {
    ecproc::CounterRng rng(seed, stream);
    ecproc::PointSet pts(d);
    std::vector<double> p(d);
    for (std::size_t i = 0; i < m; ++i) {
        for (double& x : p) x = rng.uniform(lo, hi);
        pts.push_back(p);
    }
    return pts;
}

}  // namespace testing
