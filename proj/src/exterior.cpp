#include "nlbellman/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "nlbellman/error.hpp"

namespace nlb {

ExteriorRule ExteriorRule::zero() { return ExteriorRule{}; }

ExteriorRule ExteriorRule::constant(double c) {
    if (!std::isfinite(c)) throw InvalidArgument("constant exterior must be finite");
    ExteriorRule r;
    r.kind_ = Kind::constant;
    r.data_ = c;
    return r;
}

ExteriorRule ExteriorRule::analytic(AnalyticFunction f) {
    ExteriorRule r;
    r.kind_ = Kind::analytic;
    r.data_ = std::move(f);
    return r;
}

ExteriorRule ExteriorRule::layered(const LayeredData& data) {
    if (!(data.upper >= data.lower)) throw InvalidArgument("layered exterior needs lower <= upper");
    if (!std::isfinite(data.below) || !std::isfinite(data.between) || !std::isfinite(data.above))
        throw InvalidArgument("layered exterior values must be finite");
    ExteriorRule r;
    r.kind_ = Kind::layered;
    r.data_ = data;
    return r;
}

ExteriorRule ExteriorRule::reflect_plane(int axis, double position, ExteriorRule base) {
    if (axis < 0 || axis >= kMaxDim) throw InvalidArgument("reflection axis out of range");
    ExteriorRule r;
    r.kind_ = Kind::reflect_plane;
    r.data_ = ReflectedData{axis, position, std::make_shared<const ExteriorRule>(std::move(base))};
    return r;
}

ExteriorRule::Kind ExteriorRule::kind() const { return kind_; }

std::string_view ExteriorRule::kind_name() const {
    switch (kind_) {
        case Kind::zero: return "zero";
        case Kind::constant: return "constant";
        case Kind::analytic: return "analytic";
        case Kind::layered: return "layered";
        case Kind::reflect_plane: return "reflect_plane";
    }
    return "unknown";
}

double ExteriorRule::operator()(const Point& x, int dim) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::constant: return std::get<double>(data_);
        case Kind::analytic: return std::get<AnalyticFunction>(data_)(x);
        case Kind::layered: return std::get<LayeredData>(data_).at_height(x[dim - 1]);
        case Kind::reflect_plane: {
            const auto& r = std::get<ReflectedData>(data_);
            Point y = x;
            y[r.axis] = 2.0 * r.position - x[r.axis];
            return (*r.base)(y, dim);
        }
    }
    return 0.0;
}

bool ExteriorRule::is_layered() const {
    return kind_ == Kind::zero || kind_ == Kind::constant || kind_ == Kind::layered;
}

LayeredData ExteriorRule::as_layered() const {
    switch (kind_) {
        case Kind::zero: return LayeredData{};
        case Kind::constant: {
            const double c = std::get<double>(data_);
            return LayeredData{0.0, 0.0, c, c, c};
        }
        case Kind::layered: return std::get<LayeredData>(data_);
        default: throw InvalidArgument("exterior rule '" + std::string(kind_name()) + "' is not layered");
    }
}

int ExteriorRule::growth_exponent() const {
    switch (kind_) {
        case Kind::analytic: return std::get<AnalyticFunction>(data_).growth_exponent();
        case Kind::reflect_plane: return std::get<ReflectedData>(data_).base->growth_exponent();
        default: return 0;
    }
}

std::pair<double, double> ExteriorRule::growth_bound() const {
    switch (kind_) {
        case Kind::zero: return {0.0, 0.0};
        case Kind::constant: return {std::abs(std::get<double>(data_)), 0.0};
        case Kind::analytic: return std::get<AnalyticFunction>(data_).growth_bound();
        case Kind::layered: {
            const auto& l = std::get<LayeredData>(data_);
            return {std::max({std::abs(l.below), std::abs(l.between), std::abs(l.above)}), 0.0};
        }
        case Kind::reflect_plane: {
            const auto& r = std::get<ReflectedData>(data_);
            auto [a, b] = r.base->growth_bound();
            return {a + 2.0 * b * std::abs(r.position), b};
        }
    }
    return {0.0, 0.0};
}

ExteriorRule ExteriorRule::operator+(const ExteriorRule& other) const {
    const bool this_const = kind_ == Kind::zero || kind_ == Kind::constant;
    const bool other_const = other.kind_ == Kind::zero || other.kind_ == Kind::constant;
    if (this_const && other_const) return constant(as_layered().below + other.as_layered().below);
    if (is_layered() && other.is_layered()) {
        LayeredData a = as_layered(), b = other.as_layered();
        if (this_const) std::swap(a, b);
        if (this_const || other_const) {
            a.below += b.below;
            a.between += b.below;
            a.above += b.below;
            return layered(a);
        }
        if (a.lower == b.lower && a.upper == b.upper) {
            a.below += b.below;
            a.between += b.between;
            a.above += b.above;
            return layered(a);
        }
        throw InvalidArgument("cannot add layered exteriors with different levels");
    }
    auto as_analytic = [](const ExteriorRule& r, int dim) -> std::optional<AnalyticFunction> {
        if (r.kind_ == Kind::analytic) return std::get<AnalyticFunction>(r.data_);
        if (r.kind_ == Kind::zero) return AnalyticFunction(dim, {});
        if (r.kind_ == Kind::constant) {
            AnalyticTerm t;
            t.amplitude = std::get<double>(r.data_);
            return AnalyticFunction(dim, {t});
        }
        return std::nullopt;
    };
    const int dim = kind_ == Kind::analytic ? std::get<AnalyticFunction>(data_).dim()
                    : other.kind_ == Kind::analytic ? std::get<AnalyticFunction>(other.data_).dim()
                                                    : 2;
    auto a = as_analytic(*this, dim);
    auto b = as_analytic(other, dim);
    if (a && b) return analytic(*a + *b);
    throw InvalidArgument("unsupported exterior sum: " + std::string(kind_name()) + " + " +
                          std::string(other.kind_name()));
}

double ExteriorRule::constant_value() const {
    if (kind_ == Kind::zero) return 0.0;
    if (kind_ != Kind::constant) throw InvalidArgument("exterior rule is not constant");
    return std::get<double>(data_);
}

}  // namespace nlb
