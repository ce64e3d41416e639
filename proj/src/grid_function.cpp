#include "nlbellman/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "nlbellman/config.hpp"
#include "nlbellman/error.hpp"

namespace nlb {

GridFunction::GridFunction(Lattice lattice, std::vector<double> values, ExteriorRule exterior)
    : lattice_(std::move(lattice)), values_(std::move(values)), exterior_(std::move(exterior)) {
    if (values_.size() != lattice_.size())
        throw InvalidArgument("grid function has " + std::to_string(values_.size()) + " values for " +
                              std::to_string(lattice_.size()) + " nodes");
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]))
            throw InvalidArgument("non-finite sample at node " + to_string(lattice_.node(i), dim()));
}

double GridFunction::operator()(const Point& x) const {
    const int n = dim();
    const double slack = 1e-12 * lattice_.spacing();
    std::array<int, kMaxDim> base{0, 0, 0};
    std::array<double, kMaxDim> frac{0.0, 0.0, 0.0};
    for (int d = 0; d < n; ++d) {
        const double t = lattice_.coordinate(x, d);
        const int last = lattice_.count(d) - 1;
        if (t < -slack || t > last + slack) return exterior_(x, n);
        int i = static_cast<int>(std::floor(t));
        i = std::clamp(i, 0, std::max(last - 1, 0));
        base[d] = i;
        frac[d] = std::clamp(t - i, 0.0, 1.0);
    }
    double acc = 0.0;
    for (int corner = 0; corner < (1 << n); ++corner) {
        double w = 1.0;
        std::size_t lin = 0;
        for (int d = 0; d < n; ++d) {
            const int bit = (corner >> d) & 1;
            w *= bit ? frac[d] : 1.0 - frac[d];
            lin += static_cast<std::size_t>(base[d] + bit) * lattice_.stride(d);
        }
        if (w != 0.0) acc += w * values_[lin];
    }
    return acc;
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

GridFunction GridFunction::operator+(const GridFunction& other) const {
    const Box& a = lattice_.box();
    const Box& b = other.lattice_.box();
    if (a.dim != b.dim || lattice_.spacing() != other.lattice_.spacing() || a.lo != b.lo || a.hi != b.hi)
        throw InvalidArgument("grid functions live on different lattices");
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + other.values_[i];
    return GridFunction(lattice_, std::move(v), exterior_ + other.exterior_);
}

void GridFunction::write_csv(std::ostream& os) const {
    const int n = dim();
    static const char* axes[] = {"x", "y", "z"};
    for (int d = 0; d < n; ++d) os << 'i' << d << ',';
    for (int d = 0; d < n; ++d) os << axes[d] << ',';
    os << "u\n";
    os.precision(17);
    for (std::size_t l = 0; l < values_.size(); ++l) {
        const Index idx = lattice_.multi(l);
        const Point p = lattice_.node(idx);
        for (int d = 0; d < n; ++d) os << idx[d] << ',';
        for (int d = 0; d < n; ++d) os << p[d] << ',';
        os << values_[l] << '\n';
    }
}

GridFunction make_grid_function(const Box& box, double h, const AnalyticFunction& f) {
    if (f.dim() != box.dim) throw InvalidArgument("expression dimension does not match the box");
    Lattice lattice(box, h);
    std::vector<double> values(lattice.size());
    for (std::size_t l = 0; l < values.size(); ++l) {
        values[l] = f(lattice.node(l));
        if (!std::isfinite(values[l]))
            throw InvalidArgument("non-finite sample at node " + to_string(lattice.node(l), box.dim));
    }
    return GridFunction(std::move(lattice), std::move(values), ExteriorRule::analytic(f));
}

namespace {

// int_{r0}^inf r^{n-1+k} / (1 + r^{n+2s}) dr, bounded by the smaller of the
// full-line closed form and the pure power tail.
double radial_weight_integral(int n, double s, int k, double r0) {
    const double m = n + 2.0 * s;
    const double full = std::numbers::pi / (m * std::sin(std::numbers::pi * (n + k) / m));
    if (r0 <= 0.0) return full;
    const double tail = std::pow(r0, k - 2.0 * s) / (2.0 * s - k);
    return std::min(full, tail);
}

}  // namespace

LsMembership check_Ls_membership(const GridFunction& gf, double s) {
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("s must lie in (0, 1)");
    const int n = gf.dim();
    const ExteriorRule& g = gf.exterior();
    const int gamma = g.growth_exponent();
    if (gamma >= 1 && 2.0 * s <= gamma) return {false, std::numeric_limits<double>::infinity()};
    const auto [a, b] = g.growth_bound();
    const double r0 = gf.lattice().box().inner_distance(Point{});
    double bound = a * radial_weight_integral(n, s, 0, r0);
    if (b > 0.0) bound += b * radial_weight_integral(n, s, 1, r0);
    return {true, sphere_area(n) * bound};
}

}  // namespace nlb
