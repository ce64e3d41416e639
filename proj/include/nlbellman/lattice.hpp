#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

namespace nlb {

inline constexpr int kMaxDim = 3;

/// Point in R^n, n <= 3. Components beyond the active dimension are zero.
using Point = std::array<double, kMaxDim>;
using Index = std::array<int, kMaxDim>;

inline double dot(const Point& a, const Point& b, int dim) {
    double acc = 0.0;
    for (int d = 0; d < dim; ++d) acc += a[d] * b[d];
    return acc;
}

inline double norm(const Point& a, int dim) { return std::sqrt(dot(a, a, dim)); }

inline Point operator+(const Point& a, const Point& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Point operator-(const Point& a, const Point& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Point operator*(double c, const Point& a) { return {c * a[0], c * a[1], c * a[2]}; }

std::string to_string(const Point& p, int dim);

/// Axis-aligned box [lo, hi] in R^dim.
struct Box {
    int dim = 2;
    Point lo{};
    Point hi{};

    static Box cube(int dim, double half_width);

    double diameter() const;
    double edge(int axis) const { return hi[axis] - lo[axis]; }
    /// True if p lies inside the box shrunk by `margin` on every side.
    bool contains(const Point& p, double margin = 0.0) const;
    /// Distance from p to the complement of the box (0 outside).
    double inner_distance(const Point& p) const;
};

/// Uniform lattice of nodes covering a box. Axis 0 varies fastest in the
/// linear node numbering.
class Lattice {
public:
    Lattice() = default;
    /// Throws InvalidArgument unless h > 0 divides every box edge.
    Lattice(const Box& box, double h);

    int dim() const { return box_.dim; }
    const Box& box() const { return box_; }
    double spacing() const { return h_; }
    int count(int axis) const { return count_[axis]; }
    std::size_t stride(int axis) const { return stride_[axis]; }
    std::size_t size() const { return size_; }

    std::size_t linear(const Index& idx) const {
        std::size_t l = 0;
        for (int d = 0; d < dim(); ++d) l += static_cast<std::size_t>(idx[d]) * stride_[d];
        return l;
    }
    Index multi(std::size_t linear) const;
    bool in_range(const Index& idx) const {
        for (int d = 0; d < dim(); ++d)
            if (idx[d] < 0 || idx[d] >= count_[d]) return false;
        return true;
    }

    Point node(const Index& idx) const {
        Point p{};
        for (int d = 0; d < dim(); ++d) p[d] = box_.lo[d] + h_ * idx[d];
        return p;
    }
    Point node(std::size_t linear) const { return node(multi(linear)); }

    /// Lattice coordinate of p along an axis, in units of h from the lower corner.
    double coordinate(const Point& p, int axis) const { return (p[axis] - box_.lo[axis]) / h_; }

    /// Nearest lattice index to p (may be out of range).
    Index nearest(const Point& p) const;

private:
    Box box_{};
    double h_ = 0.0;
    Index count_{1, 1, 1};
    std::array<std::size_t, kMaxDim> stride_{0, 0, 0};
    std::size_t size_ = 0;
};

}  // namespace nlb
