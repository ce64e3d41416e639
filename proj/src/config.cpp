#include "nlbellman/config.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nlbellman/error.hpp"

namespace nlb {

double sphere_area(int m) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

double fractional_laplacian_constant(int n, double s) {
    return s * std::pow(4.0, s) * std::tgamma(0.5 * n + s) / (std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(1.0 - s));
}

double half_space_kernel_mass(int n, double s) {
    const double a = 0.5 * (n - 1);
    const double b = 0.5 + s;
    const double beta = std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
    return sphere_area(n - 1) * beta / (4.0 * s);
}

void OperatorConfig::validate() const {
    if (n < 2 || n > 3) throw InvalidArgument("config.n must be 2 or 3 (got " + std::to_string(n) + ")");
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("config.s must lie in (0, 1)");
    if (!(theta > 0.0) || !std::isfinite(theta)) throw InvalidArgument("config.theta must be positive");
    if (!(Theta >= theta) || !std::isfinite(Theta)) throw InvalidArgument("config.Theta must be >= theta");
    if (!(c_ns >= 0.0) || !std::isfinite(c_ns)) throw InvalidArgument("config.c_ns must be positive (0 selects the default)");
    if (!(near_radius >= 0.0) || !std::isfinite(near_radius)) throw InvalidArgument("config.near_radius must be positive");
    if (!(far_radius >= 0.0) || !std::isfinite(far_radius)) throw InvalidArgument("config.far_radius must be positive");
}

QuadratureScheme QuadratureScheme::resolve(const OperatorConfig& config, double h, double box_diameter,
                                           QuadratureScheme base) {
    QuadratureScheme q = base;
    if (!(q.near_radius > 0.0)) q.near_radius = config.near_radius > 0.0 ? config.near_radius : 4.0 * h;
    if (!(q.far_radius > 0.0)) q.far_radius = config.far_radius > 0.0 ? config.far_radius : 2.0 * box_diameter;
    if (q.far_radius < 2.0 * box_diameter * (1.0 - 1e-12))
        throw InvalidArgument("far_radius must be at least twice the box diameter");
    q.validate(h);
    return q;
}

QuadratureScheme QuadratureScheme::resolve(const OperatorConfig& config, double h, double box_diameter) {
    return resolve(config, h, box_diameter, QuadratureScheme{});
}

void QuadratureScheme::validate(double h) const {
    if (!(near_radius >= h * (1.0 - 1e-12))) throw InvalidArgument("near_radius must be at least the grid spacing");
    if (!(far_radius > near_radius)) throw InvalidArgument("far_radius must exceed near_radius");
    if (!(radial_panels_per_log > 0.0)) throw InvalidArgument("radial_panels_per_log must be positive");
    if (radial_order < 1 || angular < 1 || tail_order < 2) throw InvalidArgument("quadrature orders must be positive");
}

}  // namespace nlb
