#include "nlbellman/analytic.hpp"

#include <cmath>

#include "nlbellman/error.hpp"

namespace nlb {

std::string_view tag_name(Tag tag) {
    switch (tag) {
        case Tag::constant: return "constant";
        case Tag::gaussian: return "gaussian";
        case Tag::bump: return "bump";
        case Tag::sqrt_quadratic: return "sqrt_quadratic";
        case Tag::linear_cap: return "linear_cap";
    }
    return "unknown";
}

Tag parse_tag(std::string_view name) {
    for (Tag t : {Tag::constant, Tag::gaussian, Tag::bump, Tag::sqrt_quadratic, Tag::linear_cap})
        if (tag_name(t) == name) return t;
    throw InvalidArgument("unsupported expression tag '" + std::string(name) + "'");
}

double AnalyticTerm::value(const Point& x, int dim) const {
    const Point d = x - center;
    const double q = dot(d, d, dim) / (width * width);
    switch (tag) {
        case Tag::constant: return amplitude;
        case Tag::gaussian: return amplitude * std::exp(-q);
        case Tag::bump: return q < 1.0 ? amplitude * std::exp(q / (q - 1.0)) : 0.0;
        case Tag::sqrt_quadratic: return amplitude * std::sqrt(1.0 + q);
        case Tag::linear_cap: return amplitude + slope * d[axis];
    }
    return 0.0;
}

Mat AnalyticTerm::hessian(const Point& x, int dim) const {
    Mat H = Mat::Zero(dim, dim);
    const Point d = x - center;
    const double w2 = width * width;
    const double q = dot(d, d, dim) / w2;
    switch (tag) {
        case Tag::constant:
        case Tag::linear_cap: break;
        case Tag::gaussian: {
            const double u = amplitude * std::exp(-q);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    H(i, j) = u * (4.0 * d[i] * d[j] / (w2 * w2) - (i == j ? 2.0 / w2 : 0.0));
            break;
        }
        case Tag::bump: {
            if (q >= 1.0) break;
            const double u = amplitude * std::exp(q / (q - 1.0));
            const double g1 = -1.0 / ((q - 1.0) * (q - 1.0));
            const double g2 = 2.0 / ((q - 1.0) * (q - 1.0) * (q - 1.0));
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    H(i, j) = u * ((g1 * g1 + g2) * 4.0 * d[i] * d[j] / (w2 * w2) + (i == j ? 2.0 * g1 / w2 : 0.0));
            break;
        }
        case Tag::sqrt_quadratic: {
            const double root = std::sqrt(1.0 + q);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    H(i, j) = amplitude * ((i == j ? 1.0 / (w2 * root) : 0.0) - d[i] * d[j] / (w2 * w2 * root * root * root));
            break;
        }
    }
    return H;
}

AnalyticFunction::AnalyticFunction(int dim, std::vector<AnalyticTerm> terms) : dim_(dim), terms_(std::move(terms)) {
    if (dim < 1 || dim > kMaxDim) throw InvalidArgument("analytic function dimension must be 1..3");
    for (const auto& t : terms_) {
        if (!std::isfinite(t.amplitude) || !std::isfinite(t.slope)) throw InvalidArgument("non-finite tag parameter");
        if (!(t.width > 0.0)) throw InvalidArgument("tag width must be positive");
        if (t.axis < 0 || t.axis >= dim) throw InvalidArgument("linear_cap axis out of range");
    }
}

double AnalyticFunction::operator()(const Point& x) const {
    double acc = 0.0;
    for (const auto& t : terms_) acc += t.value(x, dim_);
    return acc;
}

Mat AnalyticFunction::hessian(const Point& x) const {
    Mat H = Mat::Zero(dim_, dim_);
    for (const auto& t : terms_) H += t.hessian(x, dim_);
    return H;
}

int AnalyticFunction::growth_exponent() const {
    for (const auto& t : terms_) {
        if (t.amplitude != 0.0 && t.tag == Tag::sqrt_quadratic) return 1;
        if (t.slope != 0.0 && t.tag == Tag::linear_cap) return 1;
    }
    return 0;
}

std::pair<double, double> AnalyticFunction::growth_bound() const {
    double a = 0.0, b = 0.0;
    for (const auto& t : terms_) {
        const double amp = std::abs(t.amplitude);
        switch (t.tag) {
            case Tag::constant:
            case Tag::gaussian:
            case Tag::bump: a += amp; break;
            case Tag::sqrt_quadratic:
                a += amp * (1.0 + norm(t.center, dim_) / t.width);
                b += amp / t.width;
                break;
            case Tag::linear_cap:
                a += amp + std::abs(t.slope * t.center[t.axis]);
                b += std::abs(t.slope);
                break;
        }
    }
    return {a, b};
}

bool AnalyticFunction::has_fourier_transform() const {
    for (const auto& t : terms_)
        if (t.tag != Tag::constant && t.tag != Tag::gaussian) return false;
    return true;
}

bool AnalyticFunction::is_affine() const {
    for (const auto& t : terms_)
        if (t.tag != Tag::constant && t.tag != Tag::linear_cap && t.amplitude != 0.0) return false;
    return true;
}

AnalyticFunction AnalyticFunction::translated(const Point& shift) const {
    AnalyticFunction out = *this;
    for (auto& t : out.terms_) {
        t.center = t.center + shift;
    }
    return out;
}

AnalyticFunction AnalyticFunction::operator+(const AnalyticFunction& other) const {
    if (other.dim_ != dim_) throw InvalidArgument("dimension mismatch in analytic sum");
    AnalyticFunction out = *this;
    out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
    return out;
}

}  // namespace nlb
