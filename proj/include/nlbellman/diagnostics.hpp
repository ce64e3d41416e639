#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nlbellman/grid_function.hpp"
#include "nlbellman/nonlinearity.hpp"
#include "nlbellman/problem.hpp"
#include "nlbellman/quadrature.hpp"
#include "nlbellman/solver.hpp"

namespace nlb {

struct PlaneRecord {
    double lambda = 0.0;
    /// Nodes of Sigma_lambda inside the domain; min_w is +inf when zero.
    std::size_t nodes = 0;
    double min_w = 0.0;
    Point argmin{};
    /// Linearised coefficient -(f(u_lambda) - f(u)) / (u_lambda - u) at the argmin
    /// (0 when |w| <= 1e-12 or no f is given).
    double c = 0.0;
};

/// Moving-plane sweep along an axis direction d: Sigma_lambda = {x . d < lambda},
/// x^lambda = x + 2(lambda - x . d) d and w_lambda = u(x^lambda) - u(x).
struct PlaneSweepReport {
    Point direction{};
    double center = 0.0;
    double tol = 0.0;
    std::vector<PlaneRecord> records;
    /// max |u(x^center) - u(x)| over domain nodes.
    double reflection_deviation = 0.0;
    /// max |w(x^lambda) + w(x)| over swept pairs; zero on reflection-aligned grids.
    double antisymmetry_defect = 0.0;
    bool monotone = false;
    bool symmetric = false;
};

/// Planes strictly below `center` at half-grid positions lambda = center - k h / 2.
std::vector<double> half_grid_lambdas(const Lattice& lattice, int axis, double center, double extent);

/// Throws InvalidArgument when the direction is not +-e_k or a lambda is not
/// reflection-aligned with the lattice.
PlaneSweepReport moving_planes_sweep(const GridFunction& u, const Geometry& domain, const Point& direction,
                                     std::span<const double> lambdas, const Nonlinearity* f, double tol,
                                     double center = 0.0);

struct SlideRecord {
    double tau = 0.0;
    std::size_t nodes = 0;
    double min_w = 0.0;
    Point argmin{};
};

/// w^tau(x) = u(x', x_n + tau) - u(x) over domain nodes with x_n <= probe_top.
struct SlideReport {
    std::vector<SlideRecord> records;
    double tol = 0.0;
    double probe_top = 0.0;
    bool monotone = false;
};

/// Throws InvalidArgument when a tau is negative or reaches the slab height.
SlideReport sliding_sweep(const GridFunction& u, const Geometry& domain, std::span<const double> taus, double tol,
                          std::optional<double> probe_top = std::nullopt);

/// Slab-doubling study: minima of w^tau at heights L and 2L over the same probe
/// region, with the truncation error bar sup |u_L - u_2L| over the probe
/// region and its shifts.
struct SlideTruncation {
    SlideReport base;
    SlideReport doubled;
    double error_bar = 0.0;
    double max_min_change = 0.0;
    /// max |u_L| over the base solve.
    double base_max_abs = 0.0;
    bool within_bar = false;
    SolveReport base_solve;
    SolveReport doubled_solve;
};

SlideTruncation sliding_truncation_study(const ProblemSpec& strip, std::span<const double> taus, double tol,
                                         double probe_top, const SolveOptions& options = {});

struct RadialReport {
    /// max over exact equal-radius orbits of (max - min)
    double max_orbit_spread = 0.0;
    double spread_radius = 0.0;
    std::size_t orbits = 0;
    /// Shell means over bins of width h/2, and the largest increase between
    /// consecutive shells (0 when the means are nonincreasing).
    std::vector<double> shell_radius;
    std::vector<double> shell_mean;
    double shell_violation = 0.0;
};

/// Nodes within `max_radius` of the center are grouped into orbits of equal
/// radius (to 1e-9 h) and into shells of width h/2.
RadialReport radial_symmetry_check(const GridFunction& u, const Point& center, double max_radius);

struct SchrodingerRecord {
    double threshold = 0.0;
    std::vector<double> radii;
    std::vector<double> sup_outside;
    double limsup_estimate = 0.0;
    bool hypothesis_holds = false;
    std::vector<PlaneSweepReport> sweeps;
};

/// Threshold (1/p)^{1/(p-1)} against sup_{|x| > R} u for the given radii.
/// With a domain, also sweeps planes in every axis direction.
SchrodingerRecord schrodinger_threshold_check(const GridFunction& u, double p, std::span<const double> radii,
                                              const Geometry* domain = nullptr, double tol = 0.0);

double schrodinger_threshold(double p);

struct AsymptoticBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
};

struct AsymptoticReport {
    bool applicable = false;
    double mu = 0.0;
    double M0 = 0.0;
    double eps0 = 0.0;
    std::vector<AsymptoticBin> bins;
    double truncation_error = 0.0;
    /// Bin minima nondecreasing beyond M0 (within the truncation error).
    bool monotone_beyond_M0 = false;
    /// All values within [-tol, mu + tol].
    bool within_range = false;
    /// Farthest bin minimum >= mu - delta1.
    bool near_mu = false;
};

/// Bins nodes of the slab by height above the lower boundary. `M0` from
/// estimate_M0; eps0 = min(delta0, inf of u over B_{M0}(y0) / 2) with y0 the
/// deepest probed node on the axis.
AsymptoticReport asymptotic_sweep(const GridFunction& u, const Geometry& domain, const Nonlinearity& f, double M0,
                                  double bin_width, double truncation_error = 0.0, double range_max = 2.0);

struct MaLimitRow {
    double s = 0.0;
    std::vector<double> ratios;
    double mean = 0.0;
    /// (max - min) / mean over the points.
    double spread = 0.0;
};

struct MaLimitTable {
    std::vector<Point> points;
    std::vector<double> hessian_root;  // det(D^2 u)^{1/n}
    std::vector<MaLimitRow> rows;
    bool spread_shrinks = false;
};

struct MaLimitOptions {
    double h = 0.05;
    double half_width = 3.0;
    int eig_resolution = 17;
    int angle_resolution = 32;
};

/// r(x, s) = (1 - s) D_s u(x) / det(D^2 u(x))^{1/n} for a convex analytic u.
/// Throws InvalidArgument if the Hessian is not positive definite at a point.
MaLimitTable ma_limit_sweep(const AnalyticFunction& u, std::span<const double> s_list, std::span<const Point> points,
                            double theta, const MaLimitOptions& options = {});

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> radii;
    std::vector<double> values;  // F_s psi at (r, 0, ...)
    std::size_t excluded = 0;    // samples under the noise floor
    double sup_abs = 0.0;        // sup |F_s psi| over the sup grid
};

struct DecayOptions {
    double h = 0.1;
    double half_width = 12.0;
    /// Spacing of the boundedness grid.
    double sup_spacing = 1.0;
    double noise_floor = 1e-12;
};

/// Least-squares slope of log |F_s psi| against log r for the bump psi.
DecayFit decay_exponent_fit(const ControlSet& controls, const OperatorConfig& config, std::span<const double> radii,
                            const DecayOptions& options = {});

struct DecayProbe {
    Point x{};
    double c = 0.0;
    /// |x|^{2s} c(x)
    double scaled_c = 0.0;
    /// -reflection_mass(x) |x|^{2s} / 4, the empirical threshold.
    double threshold = 0.0;
    double margin = 0.0;
    bool satisfied = false;
};

/// Compares |x|^{2s} c(x) with the reflection-mass surrogate for the plane
/// through the origin normal to e_1 (the first axis).
template <class CField>
std::vector<DecayProbe> decay_threshold_probe(const CField& c_field, std::span<const Point> points,
                                              const ControlSet& controls, const OperatorConfig& config);

/// K at which c(x) = -K |x|^{-2s} flips from satisfied to violated at x.
double decay_threshold_bisect(const Point& x, const ControlSet& controls, const OperatorConfig& config,
                              double K_hi = 1e3, double tol = 1e-10);

DecayProbe decay_probe_point(const Point& x, double c, const ControlSet& controls, const OperatorConfig& config);

template <class CField>
std::vector<DecayProbe> decay_threshold_probe(const CField& c_field, std::span<const Point> points,
                                              const ControlSet& controls, const OperatorConfig& config) {
    std::vector<DecayProbe> out;
    out.reserve(points.size());
    for (const Point& x : points) out.push_back(decay_probe_point(x, c_field(x), controls, config));
    return out;
}

}  // namespace nlb
