#include "nlbellman/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include "nlbellman/error.hpp"

namespace nlb {

Nonlinearity Nonlinearity::power(double p) {
    if (!(p >= 1.0)) throw InvalidArgument("power nonlinearity needs p >= 1");
    Nonlinearity f;
    f.kind = Kind::power;
    f.p = p;
    return f;
}

Nonlinearity Nonlinearity::exponential(double kappa) {
    if (!std::isfinite(kappa)) throw InvalidArgument("exponential rate must be finite");
    Nonlinearity f;
    f.kind = Kind::exponential;
    f.kappa = kappa;
    return f;
}

Nonlinearity Nonlinearity::de_giorgi() {
    Nonlinearity f;
    f.kind = Kind::de_giorgi;
    f.mu = 1.0;
    return f;
}

Nonlinearity Nonlinearity::schrodinger_power(double p) {
    if (!(p > 1.0)) throw InvalidArgument("Schrodinger nonlinearity needs p > 1");
    Nonlinearity f;
    f.kind = Kind::schrodinger_power;
    f.p = p;
    f.mu = 1.0;
    return f;
}

Nonlinearity Nonlinearity::constant(double c) {
    if (!std::isfinite(c)) throw InvalidArgument("constant nonlinearity must be finite");
    Nonlinearity f;
    f.kind = Kind::constant;
    f.c = c;
    return f;
}

Nonlinearity Nonlinearity::gradient_weighted(const Nonlinearity& base, double sigma) {
    if (base.kind == Kind::gradient_weighted) throw InvalidArgument("gradient weights do not nest");
    Nonlinearity f;
    f.kind = Kind::gradient_weighted;
    f.sigma = sigma;
    f.base = std::make_shared<const Nonlinearity>(base);
    f.mu = base.mu;
    return f;
}

std::string_view Nonlinearity::name() const {
    switch (kind) {
        case Kind::power: return "power";
        case Kind::exponential: return "exponential";
        case Kind::de_giorgi: return "de_giorgi";
        case Kind::schrodinger_power: return "schrodinger_power";
        case Kind::gradient_weighted: return "gradient_weighted";
        case Kind::constant: return "constant";
    }
    return "unknown";
}

namespace {

double signed_power(double t, double p) {
    if (t >= 0.0) return std::pow(t, p);
    if (p == std::round(p)) return std::pow(t, p);
    return 0.0;
}

}  // namespace

double Nonlinearity::operator()(double t) const {
    switch (kind) {
        case Kind::power: return signed_power(t, p);
        case Kind::exponential: return std::exp(kappa * t);
        case Kind::de_giorgi: return t - t * t * t;
        case Kind::schrodinger_power: return signed_power(t, p) - t;
        case Kind::gradient_weighted: return (*base)(t);
        case Kind::constant: return c;
    }
    return 0.0;
}

double Nonlinearity::operator()(double t, const Vec& grad) const {
    if (kind != Kind::gradient_weighted) return (*this)(t);
    return (*base)(t) * std::pow(1.0 + grad.squaredNorm(), 0.5 * sigma);
}

double Nonlinearity::lipschitz(double lo, double hi, int samples) const {
    if (!(hi >= lo) || samples < 2) throw InvalidArgument("Lipschitz range must be nonempty");
    if (hi == lo) hi = lo + 1e-12;
    const double dt = (hi - lo) / (samples - 1);
    double prev = (*this)(lo);
    if (!std::isfinite(prev)) throw EvaluationError("nonlinearity is not finite on the working range");
    double L = 0.0;
    for (int k = 1; k < samples; ++k) {
        const double v = (*this)(lo + k * dt);
        if (!std::isfinite(v)) throw EvaluationError("nonlinearity is not finite on the working range");
        L = std::max(L, std::abs(v - prev) / dt);
        prev = v;
    }
    return L;
}

bool Nonlinearity::nonincreasing(double lo, double hi, int samples) const {
    const double dt = (hi - lo) / std::max(samples - 1, 1);
    double prev = (*this)(lo);
    for (int k = 1; k < samples; ++k) {
        const double v = (*this)(lo + k * dt);
        if (v > prev + 1e-14 * std::max(1.0, std::abs(prev))) return false;
        prev = v;
    }
    return true;
}

HypothesisReport hypothesis_report(const Nonlinearity& f, double range_max, int samples) {
    if (!(range_max > 0.0) || samples < 3) throw InvalidArgument("hypothesis range must be positive");
    HypothesisReport r;
    const double tol = 1e-12;

    r.h2.holds = true;
    for (int k = 0; k < samples; ++k) {
        const double t = f.delta0 * k / (samples - 1);
        if (f(t) < f.c0 * t - tol) {
            r.h2.holds = false;
            r.h2.witness = t;
            break;
        }
    }

    if (!f.mu) {
        r.h1.applicable = r.h3.applicable = false;
        return r;
    }
    const double mu = *f.mu;

    r.h1.holds = true;
    for (int k = 1; k < samples - 1 && r.h1.holds; ++k) {
        const double t = mu * k / (samples - 1);
        if (!(f(t) > 0.0)) {
            r.h1.holds = false;
            r.h1.witness = t;
        }
    }
    if (r.h1.holds && std::abs(f(mu)) > tol) {
        r.h1.holds = false;
        r.h1.witness = mu;
    }
    for (int k = 1; k < samples && r.h1.holds && range_max > mu; ++k) {
        const double t = mu + (range_max - mu) * k / (samples - 1);
        if (f(t) > tol) {
            r.h1.holds = false;
            r.h1.witness = t;
        }
    }

    r.h3.holds = true;
    const double lo = mu - f.delta1;
    double prev = f(lo);
    for (int k = 1; k < samples; ++k) {
        const double t = lo + f.delta1 * k / (samples - 1);
        const double v = f(t);
        if (v > prev + tol) {
            r.h3.holds = false;
            r.h3.witness = t;
            break;
        }
        prev = v;
    }
    return r;
}

}  // namespace nlb
