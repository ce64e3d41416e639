#pragma once

#include <Eigen/Dense>

#include "nlbellman/lattice.hpp"

namespace nlb {

/// Small dense matrix/vector of runtime size <= 3 without heap allocation.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

inline Vec to_vec(const Point& p, int dim) {
    Vec v(dim);
    for (int d = 0; d < dim; ++d) v[d] = p[d];
    return v;
}

inline Point to_point(const Vec& v) {
    Point p{};
    for (Eigen::Index d = 0; d < v.size(); ++d) p[d] = v[d];
    return p;
}

}  // namespace nlb
