#pragma once

#include <cstddef>
#include <vector>

#include "nlbellman/config.hpp"
#include "nlbellman/controls.hpp"
#include "nlbellman/grid_function.hpp"
#include "nlbellman/rules.hpp"

namespace nlb {

/// Precomputed three-zone rule for L_A in the variables z = A^{-1} y, where
///   L_A u(x) = det A * 1/2 int (u(x + Az) + u(x - Az) - 2u(x)) |z|^{-n-2s} dz.
///   near |z| < near_radius:      Taylor model, near_coeff * tr(A H A)
///   mid  near_radius..mid_outer: product Gauss rule on log|z| x sphere
///   far  |z| > mid_outer:        tail of the exterior rule along rays
/// mid_outer = far_radius / lambda_min(A), so every far sample has |y| >= far_radius.
struct ShellRule {
    int dim = 2;
    double s = 0.5;
    ControlMatrix control;
    double near_radius = 0.0;
    double near_coeff = 0.0;
    double mid_outer = 0.0;
    /// Mid-field displacements y_q = A z_q (symmetric under y -> -y) and weights.
    std::vector<Point> offsets;
    std::vector<double> weights;
    double mid_mass = 0.0;
    /// Far-field ray directions A w_k with weights det(A) * sphere weight.
    std::vector<Point> rays;
    std::vector<double> ray_weights;
    /// det A |S^{n-1}| mid_outer^{-2s} / (2s): kernel mass of the far zone.
    double far_mass = 0.0;
    int tail_order = 48;
};

ShellRule make_shell_rule(const ControlMatrix& A, const OperatorConfig& config, const QuadratureScheme& scheme);

/// Integral of r^{-1-2s} g(x + r d) over r in [r0, inf) for the exterior rule g,
/// summed over the rays of `rule`. `error` is the gap between two tail orders
/// (zero for rules integrated exactly).
struct TailIntegral {
    double value = 0.0;
    double error = 0.0;
};

TailIntegral exterior_tail(const ExteriorRule& g, const Point& x, const ShellRule& rule);

/// Per-evaluation breakdown; value = near + mid + far.
struct Evaluation {
    double value = 0.0;
    double near = 0.0;
    double mid = 0.0;
    double far = 0.0;
    double error_bar = 0.0;
};

/// Central-difference Hessian of u at x with step h (5 points per axis pair).
Mat central_hessian(const GridFunction& u, const Point& x, double h);

/// Checks the evaluation point is at least max(near_radius, 2h) inside the box.
void require_interior(const GridFunction& u, const Point& x, const QuadratureScheme& scheme);

Evaluation eval_L_A(const GridFunction& u, const ShellRule& rule, const Point& x);
Evaluation eval_L_A(const GridFunction& u, const ControlMatrix& A, const Point& x, const OperatorConfig& config,
                    const QuadratureScheme& scheme);

struct InfimumResult {
    double value = 0.0;
    std::size_t argmin = 0;
    ControlMatrix control;
    Evaluation detail;
};

/// Holds one shell rule per control while they fit in `cache_bytes`; larger
/// sets rebuild each rule on demand. Evaluations at distinct points are
/// independent and may run concurrently.
class BellmanEvaluator {
public:
    static constexpr std::size_t kDefaultCacheBytes = std::size_t{256} << 20;

    BellmanEvaluator(ControlSet controls, OperatorConfig config, QuadratureScheme scheme,
                     std::size_t cache_bytes = kDefaultCacheBytes);

    const ControlSet& controls() const { return controls_; }
    const OperatorConfig& config() const { return config_; }
    const QuadratureScheme& scheme() const { return scheme_; }
    bool cached() const { return !rules_.empty(); }
    /// Rule of member k (built on the fly when the set is not cached).
    ShellRule rule(std::size_t k) const;

    /// min over members of L_A u(x); ties go to the earliest member.
    InfimumResult infimum(const GridFunction& u, const Point& x) const;
    Evaluation member(const GridFunction& u, std::size_t index, const Point& x) const;

private:
    ControlSet controls_;
    OperatorConfig config_;
    QuadratureScheme scheme_;
    std::vector<ShellRule> rules_;
};

InfimumResult eval_Fs(const GridFunction& u, const ControlSet& controls, const Point& x, const OperatorConfig& config,
                      const QuadratureScheme& scheme);

/// Monge-Ampere infimum over {det A = 1, lambda_min >= theta}, discretised at
/// the given resolution.
InfimumResult eval_Ds(const GridFunction& u, double theta, const Point& x, const OperatorConfig& config,
                      const QuadratureScheme& scheme, int eig_resolution = 5, int angle_resolution = 8);

/// (-Delta)^s u(x) = C_{n,s} * (-L_I u(x)).
Evaluation eval_fractional_laplacian(const GridFunction& u, const Point& x, const OperatorConfig& config,
                                     const QuadratureScheme& scheme);

struct Plane {
    int axis = 0;
    double position = 0.0;
};

/// inf over controls of the kernel mass of the half-space across `plane`
/// seen from x: det A * kappa_{n,s} * |A nu|^{2s} / d^{2s}.
/// Throws InvalidArgument when x lies on the plane.
double reflection_mass(const Point& x, const Plane& plane, const ControlSet& controls, const OperatorConfig& config);

}  // namespace nlb
