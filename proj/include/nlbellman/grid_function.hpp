#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "nlbellman/analytic.hpp"
#include "nlbellman/exterior.hpp"
#include "nlbellman/lattice.hpp"

namespace nlb {

/// Lattice samples of u on a box plus a rule for u outside the box.
/// Inside the box u is the multilinear interpolant of the samples.
class GridFunction {
public:
    GridFunction() = default;
    /// Throws InvalidArgument on size mismatch or non-finite samples.
    GridFunction(Lattice lattice, std::vector<double> values, ExteriorRule exterior);

    const Lattice& lattice() const { return lattice_; }
    int dim() const { return lattice_.dim(); }
    const std::vector<double>& values() const { return values_; }
    const ExteriorRule& exterior() const { return exterior_; }

    double operator()(const Point& x) const;
    double at(std::size_t node) const { return values_[node]; }
    double at(const Index& idx) const { return values_[lattice_.linear(idx)]; }

    double max_abs() const;

    /// Pointwise sum; both operands must share the lattice.
    GridFunction operator+(const GridFunction& other) const;

    /// Long-format CSV: one row per node with index per axis, coordinates, value.
    void write_csv(std::ostream& os) const;

private:
    Lattice lattice_;
    std::vector<double> values_;
    ExteriorRule exterior_;
};

/// Samples a closed form on the lattice of `box` with spacing h and attaches
/// the same closed form as the exterior rule.
GridFunction make_grid_function(const Box& box, double h, const AnalyticFunction& f);

/// Decision on the weighted integrability of u against (1 + |x|^{n+2s})^{-1}.
struct LsMembership {
    bool member = false;
    /// Upper bound on the weighted integral over the exterior of the box
    /// (infinite when not a member).
    double tail_bound = 0.0;
};

LsMembership check_Ls_membership(const GridFunction& gf, double s);

}  // namespace nlb
