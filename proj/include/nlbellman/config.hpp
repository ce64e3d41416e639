#pragma once

namespace nlb {

/// |S^{m-1}|, the surface area of the unit sphere in R^m.
double sphere_area(int m);

/// Normalisation of the fractional Laplacian whose Fourier symbol is |xi|^{2s}:
/// C_{n,s} = s 4^s Gamma(n/2 + s) / (pi^{n/2} Gamma(1 - s)).
double fractional_laplacian_constant(int n, double s);

/// Integral of |z|^{-n-2s} over the half-space {z_1 > 1}.
double half_space_kernel_mass(int n, double s);

/// Operator parameters shared by every evaluation.
struct OperatorConfig {
    int n = 2;
    double s = 0.5;
    double theta = 1.0;
    double Theta = 1.0;
    /// Fractional Laplacian normalisation; <= 0 means "use the standard value".
    double c_ns = 0.0;
    /// Inner quadrature cutoff (length units); <= 0 means "4 grid spacings".
    double near_radius = 0.0;
    /// Outer truncation radius (length units); <= 0 means "2 x box diameter".
    double far_radius = 0.0;

    double normalization() const { return c_ns > 0.0 ? c_ns : fractional_laplacian_constant(n, s); }

    /// Throws InvalidArgument when an invariant fails.
    void validate() const;
};

/// Resolution parameters of the three-zone quadrature.
struct QuadratureScheme {
    double near_radius = 0.0;
    double far_radius = 0.0;
    /// Gauss-Legendre panels per unit of log-radius in the mid field.
    double radial_panels_per_log = 12.0;
    int radial_order = 4;
    /// n = 2: directions on the half circle. n = 3: polar Gauss nodes.
    int angular = 64;
    /// Gauss-Legendre nodes for the far-field tail on the compactified radius.
    int tail_order = 48;

    /// Fills unset radii of `base` from the config, then from the grid spacing
    /// and box diameter. Resolution fields of `base` are kept.
    static QuadratureScheme resolve(const OperatorConfig& config, double h, double box_diameter,
                                    QuadratureScheme base);
    static QuadratureScheme resolve(const OperatorConfig& config, double h, double box_diameter);

    void validate(double h) const;
};

}  // namespace nlb
