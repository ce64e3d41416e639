#pragma once

#include <string_view>

#include "nlbellman/analytic.hpp"
#include "nlbellman/linalg.hpp"

// Reference evaluations by methods structurally different from the production
// quadrature. They work on closed-form functions only and are slow by design.
namespace nlb::oracle {

enum class Operator { frac_laplacian_fourier, frac_laplacian_direct, L_A_direct };

std::string_view operator_name(Operator op);
Operator parse_operator(std::string_view name);

struct DenseParams {
    /// n = 2: directions on the full circle. n = 3: polar Gauss nodes (azimuths doubled).
    int angular = 1024;
    int panel_order = 16;
    /// Geometric radial panels [2^k, 2^(k+1)] for k in [-octaves_in, octaves_out);
    /// below 2^-octaves_in the second difference is replaced by its Taylor term.
    int octaves_in = 10;
    int octaves_out = 30;
    /// Gauss-Legendre panels on the Fourier radius.
    int fourier_panels = 400;
};

/// (-Delta)^s u(x) from the radial Fourier integral of the exact transform.
/// Throws InvalidArgument unless every term is a constant or a Gaussian.
double frac_laplacian_fourier(const AnalyticFunction& u, const Point& x, double s, const DenseParams& params = {});

/// L_A u(x) by dense polar quadrature of the full second-difference integral,
/// with geometric radial panels and an asymptotic tail. Throws EvaluationError
/// for linearly growing u when s <= 1/2.
double L_A_direct(const AnalyticFunction& u, const Mat& A, const Point& x, double s, const DenseParams& params = {});

/// -C_{n,s} L_I u(x) from L_A_direct.
double frac_laplacian_direct(const AnalyticFunction& u, const Point& x, double s, const DenseParams& params = {});

/// Dispatch on the operator tag; `A` is used by L_A_direct only.
double oracle_eval(const AnalyticFunction& u, Operator op, const Point& x, double s, const Mat& A,
                   const DenseParams& params = {});

/// Kummer's 1F1(a; b; z) by its power series (moderate |z| only).
double hypergeometric_1f1(double a, double b, double z);

/// Closed form of (-Delta)^s exp(-|x|^2) in R^n:
/// 4^s Gamma(n/2 + s) / Gamma(n/2) 1F1(n/2 + s; n/2; -|x|^2).
double gaussian_frac_laplacian_closed_form(int n, double s, double r);

/// Integral of |A^{-1} y|^{-2-2s} over the half-plane {y_0 > d} in n = 2 by a
/// tensor Gauss-Legendre rule on compactified Cartesian coordinates.
double half_plane_kernel_direct(const Mat& A, double d, double s, int nodes = 400);

}  // namespace nlb::oracle
