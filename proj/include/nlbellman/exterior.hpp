#pragma once

#include <memory>
#include <string_view>
#include <variant>

#include "nlbellman/analytic.hpp"
#include "nlbellman/lattice.hpp"

namespace nlb {

/// Data that depends on the last coordinate only: `below` for x_n <= lower,
/// `above` for x_n >= upper and `between` otherwise. Used as exterior data for
/// slab-truncated half-space problems.
struct LayeredData {
    double lower = 0.0;
    double upper = 0.0;
    double below = 0.0;
    double between = 0.0;
    double above = 0.0;

    double at_height(double xn) const {
        if (xn <= lower) return below;
        if (xn >= upper) return above;
        return between;
    }
};

class ExteriorRule;

/// u(x) = base(reflection of x across {x[axis] = position}).
struct ReflectedData {
    int axis = 0;
    double position = 0.0;
    std::shared_ptr<const ExteriorRule> base;
};

/// How a grid function continues outside its sampling box.
class ExteriorRule {
public:
    enum class Kind { zero, constant, analytic, layered, reflect_plane };

    ExteriorRule() = default;

    static ExteriorRule zero();
    static ExteriorRule constant(double c);
    static ExteriorRule analytic(AnalyticFunction f);
    static ExteriorRule layered(const LayeredData& data);
    static ExteriorRule reflect_plane(int axis, double position, ExteriorRule base);

    Kind kind() const;
    std::string_view kind_name() const;

    /// Value at a point outside the box.
    double operator()(const Point& x, int dim) const;

    /// Functions of x_n only: zero, constant and layered rules.
    bool is_layered() const;
    /// Layered view; throws InvalidArgument unless is_layered().
    LayeredData as_layered() const;

    /// Growth exponent of the continuation: 0 bounded, 1 linear.
    int growth_exponent() const;
    /// Constants a, b with |u(x)| <= a + b|x| outside the box.
    std::pair<double, double> growth_bound() const;

    const AnalyticFunction* analytic_function() const { return std::get_if<AnalyticFunction>(&data_); }
    const ReflectedData* reflected() const { return std::get_if<ReflectedData>(&data_); }
    /// Value of a constant rule (0 for zero); throws InvalidArgument otherwise.
    double constant_value() const;

    ExteriorRule operator+(const ExteriorRule& other) const;

private:
    Kind kind_ = Kind::zero;
    std::variant<double, AnalyticFunction, LayeredData, ReflectedData> data_{0.0};
};

}  // namespace nlb
