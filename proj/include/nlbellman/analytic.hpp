#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nlbellman/lattice.hpp"
#include "nlbellman/linalg.hpp"

namespace nlb {

/// Closed-form test functions. Every tag has an exact Hessian and a known
/// growth rate at infinity, which is what the tail integrals rely on.
enum class Tag { constant, gaussian, bump, sqrt_quadratic, linear_cap };

std::string_view tag_name(Tag tag);
/// Throws InvalidArgument for unknown names.
Tag parse_tag(std::string_view name);

/// One closed-form term. Parameter meaning per tag:
///   constant        amplitude
///   gaussian        amplitude * exp(-|x - center|^2 / width^2)
///   bump            amplitude * exp(r^2 / (r^2 - 1)) for r = |x - center| / width < 1, else 0
///   sqrt_quadratic  amplitude * sqrt(1 + |x - center|^2 / width^2)
///   linear_cap      amplitude + slope * (x[axis] - center[axis])
struct AnalyticTerm {
    Tag tag = Tag::constant;
    double amplitude = 1.0;
    Point center{};
    double width = 1.0;
    double slope = 0.0;
    int axis = 0;

    double value(const Point& x, int dim) const;
    Mat hessian(const Point& x, int dim) const;
};

/// Finite sum of analytic terms in R^dim.
class AnalyticFunction {
public:
    AnalyticFunction() = default;
    AnalyticFunction(int dim, std::vector<AnalyticTerm> terms);
    static AnalyticFunction single(int dim, AnalyticTerm term) { return {dim, {term}}; }

    int dim() const { return dim_; }
    const std::vector<AnalyticTerm>& terms() const { return terms_; }

    double operator()(const Point& x) const;
    Mat hessian(const Point& x) const;

    /// 0 for bounded functions, 1 for asymptotically linear ones.
    int growth_exponent() const;
    /// Constants a, b with |u(x)| <= a + b |x| everywhere.
    std::pair<double, double> growth_bound() const;
    /// True when every term has a closed-form Fourier transform (constants and Gaussians).
    bool has_fourier_transform() const;
    /// True when every term is affine (second differences vanish identically).
    bool is_affine() const;

    /// u(. - shift)
    AnalyticFunction translated(const Point& shift) const;
    AnalyticFunction operator+(const AnalyticFunction& other) const;

private:
    int dim_ = 2;
    std::vector<AnalyticTerm> terms_;
};

}  // namespace nlb
