#include "nlbellman/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlbellman/error.hpp"

namespace nlb {

ShellRule make_shell_rule(const ControlMatrix& A, const OperatorConfig& config, const QuadratureScheme& scheme) {
    config.validate();
    const int n = config.n;
    if (A.dim() != n) throw InvalidArgument("control matrix dimension does not match config.n");
    const double s = config.s;
    ShellRule rule;
    rule.dim = n;
    rule.s = s;
    rule.control = A;
    rule.tail_order = scheme.tail_order;
    const double detA = A.det();
    const double area = sphere_area(n);

    // The near ellipsoid {|A^{-1} y| < near_radius} stays inside |y| < scheme.near_radius.
    rule.near_radius = scheme.near_radius / A.lambda_max();
    rule.near_coeff = detA * area * std::pow(rule.near_radius, 2.0 - 2.0 * s) / (2.0 * n * (2.0 - 2.0 * s));
    rule.mid_outer = scheme.far_radius / A.lambda_min();
    rule.far_mass = detA * area * std::pow(rule.mid_outer, -2.0 * s) / (2.0 * s);

    const SphereRule sphere = sphere_rule(n, scheme.angular);
    const Mat& M = A.entries();
    std::vector<Point> images(sphere.directions.size());
    for (std::size_t k = 0; k < images.size(); ++k) images[k] = to_point(M * to_vec(sphere.directions[k], n));

    const double t0 = std::log(rule.near_radius), t1 = std::log(rule.mid_outer);
    const int panels = std::max(1, static_cast<int>(std::ceil(scheme.radial_panels_per_log * (t1 - t0))));
    const double dt = (t1 - t0) / panels;
    const GaussRule g = gauss_legendre(scheme.radial_order);
    rule.offsets.reserve(static_cast<std::size_t>(panels) * g.nodes.size() * images.size());
    for (int p = 0; p < panels; ++p) {
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const double t = t0 + dt * (p + 0.5 * (g.nodes[i] + 1.0));
            const double r = std::exp(t);
            const double wr = detA * 0.5 * dt * g.weights[i] * std::pow(r, -2.0 * s);
            for (std::size_t k = 0; k < images.size(); ++k) {
                rule.offsets.push_back(r * images[k]);
                rule.weights.push_back(wr * sphere.weights[k]);
                rule.mid_mass += wr * sphere.weights[k];
            }
        }
    }
    rule.rays = images;
    rule.ray_weights.resize(images.size());
    for (std::size_t k = 0; k < images.size(); ++k) rule.ray_weights[k] = detA * sphere.weights[k];
    return rule;
}

namespace {

// int_{r0}^inf g(x + r d) r^{-1-2s} dr for data constant on height bands.
double layered_ray(const LayeredData& l, double xn, double dn, double r0, double s) {
    auto power = [s](double r) { return std::isinf(r) ? 0.0 : std::pow(r, -2.0 * s) / (2.0 * s); };
    std::vector<double> cuts{r0};
    if (dn != 0.0) {
        for (double level : {l.lower, l.upper}) {
            const double r = (level - xn) / dn;
            if (r > r0) cuts.push_back(r);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(std::numeric_limits<double>::infinity());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (!(b > a)) continue;
        const double mid = std::isinf(b) ? a + 1.0 : 0.5 * (a + b);
        acc += l.at_height(xn + mid * dn) * (power(a) - power(b));
    }
    return acc;
}

}  // namespace

TailIntegral exterior_tail(const ExteriorRule& g, const Point& x, const ShellRule& rule) {
    const int n = rule.dim;
    const double s = rule.s;
    const double R = rule.mid_outer;
    TailIntegral out;
    if (g.kind() == ExteriorRule::Kind::zero) return out;
    if (g.is_layered()) {
        const LayeredData l = g.as_layered();
        for (std::size_t k = 0; k < rule.rays.size(); ++k)
            out.value += rule.ray_weights[k] * layered_ray(l, x[n - 1], rule.rays[k][n - 1], R, s);
        return out;
    }
    const int gamma = g.growth_exponent();
    const double alpha = 2.0 * s - gamma;
    if (!(alpha > 0.0))
        throw EvaluationError("exterior data grows too fast for s = " + std::to_string(s) + " (not in L_s)");
    const double scale = std::pow(R, -2.0 * s) / alpha;
    const double expo = 2.0 * s / alpha - 1.0;
    auto quad = [&](int order) {
        const GaussRule q = gauss_legendre(order, 0.0, 1.0);
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.rays.size(); ++k) {
            double ray = 0.0;
            for (std::size_t i = 0; i < q.nodes.size(); ++i) {
                const double v = q.nodes[i];
                const double r = R * std::pow(v, -1.0 / alpha);
                ray += q.weights[i] * g(x + r * rule.rays[k], n) * std::pow(v, expo);
            }
            acc += rule.ray_weights[k] * ray;
        }
        return scale * acc;
    };
    out.value = quad(rule.tail_order);
    out.error = std::abs(out.value - quad(std::max(2, rule.tail_order / 2)));
    return out;
}

Mat central_hessian(const GridFunction& u, const Point& x, double h) {
    const int n = u.dim();
    Mat H(n, n);
    const double u0 = u(x);
    for (int i = 0; i < n; ++i) {
        Point e{};
        e[i] = h;
        H(i, i) = (u(x + e) + u(x - e) - 2.0 * u0) / (h * h);
        for (int j = i + 1; j < n; ++j) {
            Point f{};
            f[j] = h;
            H(i, j) = H(j, i) = (u(x + e + f) - u(x + e - f) - u(x - e + f) + u(x - e - f)) / (4.0 * h * h);
        }
    }
    return H;
}

void require_interior(const GridFunction& u, const Point& x, const QuadratureScheme& scheme) {
    const double margin = std::max(scheme.near_radius, 2.0 * u.lattice().spacing());
    if (!u.lattice().box().contains(x, margin * (1.0 - 1e-9)))
        throw EvaluationError("point " + to_string(x, u.dim()) + " is closer than " + std::to_string(margin) +
                              " to the sampling-box boundary");
}

namespace {

// Multilinear interpolation on the sublattice of even indices; falls back to
// the fine interpolant where the sublattice does not reach.
double interpolate_coarse(const GridFunction& u, const Point& x) {
    const Lattice& L = u.lattice();
    const int n = L.dim();
    std::array<int, kMaxDim> base{0, 0, 0};
    std::array<double, kMaxDim> frac{0.0, 0.0, 0.0};
    for (int d = 0; d < n; ++d) {
        const double t = 0.5 * L.coordinate(x, d);
        const int cells = (L.count(d) - 1) / 2;
        if (t < 0.0 || t > cells || cells < 1) return u(x);
        const int i = std::min(static_cast<int>(std::floor(t)), cells - 1);
        base[d] = 2 * i;
        frac[d] = t - i;
    }
    double acc = 0.0;
    for (int corner = 0; corner < (1 << n); ++corner) {
        double w = 1.0;
        std::size_t lin = 0;
        for (int d = 0; d < n; ++d) {
            const int bit = (corner >> d) & 1;
            w *= bit ? frac[d] : 1.0 - frac[d];
            lin += static_cast<std::size_t>(base[d] + 2 * bit) * L.stride(d);
        }
        if (w != 0.0) acc += w * u.at(lin);
    }
    return acc;
}

Evaluation evaluate(const GridFunction& u, const ShellRule& rule, const Point& x, bool with_error) {
    Evaluation e;
    const int n = rule.dim;
    const double h = u.lattice().spacing();
    const double u0 = u(x);
    const Mat& A = rule.control.entries();

    const Mat H = central_hessian(u, x, h);
    e.near = rule.near_coeff * (A * H * A).trace();

    double mid = 0.0;
    for (std::size_t q = 0; q < rule.offsets.size(); ++q) mid += rule.weights[q] * u(x + rule.offsets[q]);
    e.mid = mid - rule.mid_mass * u0;

    const TailIntegral tail = exterior_tail(u.exterior(), x, rule);
    e.far = tail.value - rule.far_mass * u0;
    e.value = e.near + e.mid + e.far;

    if (with_error) {
        const Mat H2 = central_hessian(u, x, 2.0 * h);
        const double dH = std::abs((A * (H2 - H) * A).trace());
        const double delta_y = rule.near_radius * rule.control.lambda_max();
        const double s = rule.s;
        const double hessian_err = rule.near_coeff * dH / 3.0;
        const double taylor_err = rule.near_coeff * (2.0 - 2.0 * s) / (4.0 - 2.0 * s) * delta_y * delta_y / 12.0 *
                                  4.0 * dH / (h * h);
        double coarse = 0.0;
        for (std::size_t q = 0; q < rule.offsets.size(); ++q)
            coarse += rule.weights[q] * interpolate_coarse(u, x + rule.offsets[q]);
        const double interp_err = std::abs(coarse - mid - rule.mid_mass * (interpolate_coarse(u, x) - u0)) / 3.0;
        e.error_bar = tail.error + hessian_err + taylor_err + interp_err;
        (void)n;
    }
    return e;
}

}  // namespace

Evaluation eval_L_A(const GridFunction& u, const ShellRule& rule, const Point& x) {
    if (u.dim() != rule.dim) throw InvalidArgument("grid function dimension does not match the rule");
    return evaluate(u, rule, x, true);
}

Evaluation eval_L_A(const GridFunction& u, const ControlMatrix& A, const Point& x, const OperatorConfig& config,
                    const QuadratureScheme& scheme) {
    require_interior(u, x, scheme);
    return eval_L_A(u, make_shell_rule(A, config, scheme), x);
}

BellmanEvaluator::BellmanEvaluator(ControlSet controls, OperatorConfig config, QuadratureScheme scheme,
                                   std::size_t cache_bytes)
    : controls_(std::move(controls)), config_(config), scheme_(scheme) {
    if (controls_.members.empty()) throw InvalidArgument("control set is empty");
    config_.validate();
    ShellRule first = make_shell_rule(controls_.members.front(), config_, scheme_);
    const std::size_t per_rule = first.offsets.size() * (sizeof(Point) + sizeof(double)) +
                                 first.rays.size() * (sizeof(Point) + sizeof(double));
    if (per_rule * controls_.size() > cache_bytes) return;
    rules_.reserve(controls_.size());
    rules_.push_back(std::move(first));
    for (std::size_t k = 1; k < controls_.size(); ++k)
        rules_.push_back(make_shell_rule(controls_.members[k], config_, scheme_));
}

ShellRule BellmanEvaluator::rule(std::size_t k) const {
    if (k >= controls_.size()) throw InvalidArgument("control index out of range");
    return cached() ? rules_[k] : make_shell_rule(controls_.members[k], config_, scheme_);
}

Evaluation BellmanEvaluator::member(const GridFunction& u, std::size_t index, const Point& x) const {
    require_interior(u, x, scheme_);
    if (cached()) return eval_L_A(u, rules_.at(index), x);
    return eval_L_A(u, rule(index), x);
}

InfimumResult BellmanEvaluator::infimum(const GridFunction& u, const Point& x) const {
    require_interior(u, x, scheme_);
    if (u.dim() != config_.n) throw InvalidArgument("grid function dimension does not match config.n");
    InfimumResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < controls_.size(); ++k) {
        const double v = cached() ? evaluate(u, rules_[k], x, false).value : evaluate(u, rule(k), x, false).value;
        if (v < best.value) {
            best.value = v;
            best.argmin = k;
        }
    }
    best.control = controls_.members[best.argmin];
    best.detail = cached() ? evaluate(u, rules_[best.argmin], x, true) : evaluate(u, rule(best.argmin), x, true);
    best.value = best.detail.value;
    return best;
}

InfimumResult eval_Fs(const GridFunction& u, const ControlSet& controls, const Point& x, const OperatorConfig& config,
                      const QuadratureScheme& scheme) {
    return BellmanEvaluator(controls, config, scheme).infimum(u, x);
}

InfimumResult eval_Ds(const GridFunction& u, double theta, const Point& x, const OperatorConfig& config,
                      const QuadratureScheme& scheme, int eig_resolution, int angle_resolution) {
    ControlSetSpec spec;
    spec.kind = ControlKind::monge_ampere;
    spec.n = config.n;
    spec.theta = theta;
    spec.Theta = std::pow(theta, 1 - config.n);
    spec.eig_resolution = eig_resolution;
    spec.angle_resolution = angle_resolution;
    return eval_Fs(u, build_control_set(spec), x, config, scheme);
}

Evaluation eval_fractional_laplacian(const GridFunction& u, const Point& x, const OperatorConfig& config,
                                     const QuadratureScheme& scheme) {
    const double c = config.normalization();
    Evaluation e = eval_L_A(u, ControlMatrix::identity(config.n), x, config, scheme);
    e.value *= -c;
    e.near *= -c;
    e.mid *= -c;
    e.far *= -c;
    e.error_bar *= c;
    return e;
}

double reflection_mass(const Point& x, const Plane& plane, const ControlSet& controls, const OperatorConfig& config) {
    config.validate();
    if (plane.axis < 0 || plane.axis >= config.n) throw InvalidArgument("plane axis out of range");
    const double d = std::abs(x[plane.axis] - plane.position);
    if (!(d > 0.0)) throw InvalidArgument("point lies on the plane; the reflected kernel mass diverges");
    if (controls.members.empty()) throw InvalidArgument("control set is empty");
    const double kappa = half_space_kernel_mass(config.n, config.s);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& A : controls.members) {
        const double stretch = A.entries().col(plane.axis).norm();
        best = std::min(best, A.det() * kappa * std::pow(stretch / d, 2.0 * config.s));
    }
    return best;
}

}  // namespace nlb
