#include "nlbellman/lattice.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "nlbellman/error.hpp"

namespace nlb {

std::string to_string(const Point& p, int dim) {
    std::ostringstream os;
    os << '(';
    for (int d = 0; d < dim; ++d) os << (d ? ", " : "") << p[d];
    os << ')';
    return os.str();
}

Box Box::cube(int dim, double half_width) {
    Box b;
    b.dim = dim;
    for (int d = 0; d < dim; ++d) {
        b.lo[d] = -half_width;
        b.hi[d] = half_width;
    }
    return b;
}

double Box::diameter() const {
    double acc = 0.0;
    for (int d = 0; d < dim; ++d) acc += edge(d) * edge(d);
    return std::sqrt(acc);
}

bool Box::contains(const Point& p, double margin) const {
    for (int d = 0; d < dim; ++d)
        if (p[d] < lo[d] + margin || p[d] > hi[d] - margin) return false;
    return true;
}

double Box::inner_distance(const Point& p) const {
    double dist = std::numeric_limits<double>::infinity();
    for (int d = 0; d < dim; ++d) dist = std::min({dist, p[d] - lo[d], hi[d] - p[d]});
    return std::max(dist, 0.0);
}

Lattice::Lattice(const Box& box, double h) : box_(box), h_(h) {
    if (box.dim < 1 || box.dim > kMaxDim) throw InvalidArgument("lattice dimension must be 1..3");
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing must be positive");
    size_ = 1;
    for (int d = 0; d < box.dim; ++d) {
        const double edge = box.edge(d);
        if (!(edge > 0.0)) throw InvalidArgument("box edge must be positive on axis " + std::to_string(d));
        const double cells = std::round(edge / h);
        if (cells < 1.0 || std::abs(cells * h - edge) > 1e-9 * std::max(edge, 1.0))
            throw InvalidArgument("grid spacing does not divide the box edge on axis " + std::to_string(d));
        count_[d] = static_cast<int>(cells) + 1;
        stride_[d] = size_;
        size_ *= static_cast<std::size_t>(count_[d]);
    }
    for (int d = box.dim; d < kMaxDim; ++d) {
        count_[d] = 1;
        stride_[d] = 0;
    }
}

Index Lattice::multi(std::size_t linear) const {
    Index idx{};
    for (int d = 0; d < dim(); ++d) {
        idx[d] = static_cast<int>(linear % static_cast<std::size_t>(count_[d]));
        linear /= static_cast<std::size_t>(count_[d]);
    }
    return idx;
}

Index Lattice::nearest(const Point& p) const {
    Index idx{};
    for (int d = 0; d < dim(); ++d) idx[d] = static_cast<int>(std::lround(coordinate(p, d)));
    return idx;
}

}  // namespace nlb
