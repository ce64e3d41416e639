#pragma once

#include <memory>
#include <optional>
#include <string_view>

#include "nlbellman/linalg.hpp"

namespace nlb {

/// Right-hand side f of -F_s u = f(u).
struct Nonlinearity {
    enum class Kind { power, exponential, de_giorgi, schrodinger_power, gradient_weighted, constant };

    Kind kind = Kind::constant;
    double p = 2.0;       // power, schrodinger_power
    double kappa = 0.0;   // exponential: e^{kappa t}
    double sigma = 0.0;   // gradient_weighted exponent
    double c = 0.0;       // constant value
    std::shared_ptr<const Nonlinearity> base;  // gradient_weighted

    /// Positive zero used by the asymptotic hypotheses; unset when f has none.
    std::optional<double> mu;
    double delta0 = 0.5;
    double delta1 = 0.25;
    double c0 = 0.5;

    static Nonlinearity power(double p);
    static Nonlinearity exponential(double kappa);
    static Nonlinearity de_giorgi();
    static Nonlinearity schrodinger_power(double p);
    static Nonlinearity constant(double c);
    static Nonlinearity gradient_weighted(const Nonlinearity& base, double sigma);

    std::string_view name() const;

    /// f(t). For gradient_weighted the gradient factor is taken as 1.
    double operator()(double t) const;
    /// f(x, t, grad u) = f(t) (1 + |grad u|^2)^{sigma/2} for gradient_weighted.
    double operator()(double t, const Vec& grad) const;

    /// Max |f'| over [lo, hi] estimated from dense divided differences.
    /// Throws EvaluationError if f is not finite on the range.
    double lipschitz(double lo, double hi, int samples = 2001) const;
    bool nonincreasing(double lo, double hi, int samples = 2001) const;
};

/// One hypothesis outcome. `applicable` is false when the hypothesis needs mu
/// and f has none; `witness` is a sample where the check failed.
struct HypothesisCheck {
    bool applicable = true;
    bool holds = false;
    std::optional<double> witness;
};

struct HypothesisReport {
    HypothesisCheck h1;  // f > 0 on (0, mu), f(mu) = 0, f <= 0 beyond mu
    HypothesisCheck h2;  // f(t) >= c0 t on [0, delta0]
    HypothesisCheck h3;  // f nonincreasing on (mu - delta1, mu)
};

/// Checks (H1)-(H3) on a dense sample of [0, range_max].
HypothesisReport hypothesis_report(const Nonlinearity& f, double range_max, int samples = 4001);

}  // namespace nlb
