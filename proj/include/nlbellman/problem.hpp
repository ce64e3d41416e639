#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "nlbellman/config.hpp"
#include "nlbellman/controls.hpp"
#include "nlbellman/exterior.hpp"
#include "nlbellman/lattice.hpp"
#include "nlbellman/nonlinearity.hpp"

namespace nlb {

/// Open domain of a Dirichlet problem. Unbounded domains appear truncated:
///   ball      |x - center| < radius
///   box       lo < x < hi
///   strip     0 < x_n < height, |x_i| < half_width for i < n
///   epigraph  phi(x_1) < x_n < height, |x_i| < half_width, phi piecewise linear
///   cylinder  |x'| < radius, 0 < x_n < height
struct Geometry {
    enum class Kind { ball, box, strip, epigraph, cylinder };

    Kind kind = Kind::ball;
    int dim = 2;
    Point center{};
    double radius = 1.0;
    Point lo{};
    Point hi{};
    double height = 1.0;
    double half_width = 1.0;
    /// Knots (x_1, phi) of the epigraph boundary, sorted by x_1; constant extension.
    std::vector<std::pair<double, double>> graph;

    static Geometry ball(int dim, double radius, Point center = {});
    static Geometry strip(int dim, double height, double half_width);

    std::string_view kind_name() const;
    bool contains(const Point& x) const;
    Box bounding_box() const;
    /// Height of the lower boundary under x (phi for epigraphs, 0 for strips).
    double floor_at(const Point& x) const;
    /// Distance above the lower boundary, x_n - floor_at(x).
    double height_above_floor(const Point& x) const { return x[dim - 1] - floor_at(x); }

    void validate() const;
};

/// Near-field Hessian discretisation inside the assembled operator.
/// `selling` is monotone for every SPD control; `central` is the plain
/// 5-point-per-pair stencil and has negative weights for anisotropic controls.
enum class NearStencil { selling, central };

/// Dirichlet problem -F_s u = f(u) in the geometry, u = exterior outside.
struct ProblemSpec {
    Geometry geometry;
    OperatorConfig config;
    ControlSetSpec controls;
    Nonlinearity f = Nonlinearity::constant(0.0);
    ExteriorRule exterior = ExteriorRule::zero();
    double h = 0.05;
    /// Margin (in grid spacings) between the geometry and the sampling box.
    int margin = 2;
    QuadratureScheme scheme;
    NearStencil near_stencil = NearStencil::selling;
    bool check_monotone = true;

    /// Sampling box: geometry bounding box padded by margin * h, snapped to h.
    Box sampling_box() const;
    /// Scheme with defaults resolved against the sampling box.
    QuadratureScheme resolved_scheme() const;
    void validate() const;
};

}  // namespace nlb
