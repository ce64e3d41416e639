#include "nlbellman/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "nlbellman/error.hpp"

namespace nlb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int axis_of(const Point& direction, int dim, int& sign) {
    int axis = -1;
    for (int d = 0; d < dim; ++d) {
        if (direction[d] == 0.0) continue;
        if (axis >= 0 || std::abs(direction[d]) != 1.0)
            throw InvalidArgument("moving planes support axis directions only");
        axis = d;
        sign = direction[d] > 0.0 ? 1 : -1;
    }
    if (axis < 0) throw InvalidArgument("direction must be a unit axis vector");
    return axis;
}

// Value at a lattice index that may fall outside the sampling box.
double value_at(const GridFunction& u, const Index& idx) {
    const Lattice& L = u.lattice();
    if (L.in_range(idx)) return u.at(idx);
    return u.exterior()(L.node(idx), L.dim());
}

}  // namespace

std::vector<double> half_grid_lambdas(const Lattice& lattice, int axis, double center, double extent) {
    if (axis < 0 || axis >= lattice.dim()) throw InvalidArgument("axis out of range");
    const double step = 0.5 * lattice.spacing();
    std::vector<double> out;
    for (int k = static_cast<int>(std::floor(extent / step)); k >= 1; --k) out.push_back(center - k * step);
    return out;
}

PlaneSweepReport moving_planes_sweep(const GridFunction& u, const Geometry& domain, const Point& direction,
                                     std::span<const double> lambdas, const Nonlinearity* f, double tol,
                                     double center) {
    const Lattice& L = u.lattice();
    const int n = L.dim();
    int sign = 1;
    const int axis = axis_of(direction, n, sign);
    const double h = L.spacing();

    // Index of the mirror image of node index i across {sign * x_axis = lambda}.
    auto mirror_shift = [&](double lambda) {
        const double t = (2.0 * sign * lambda - 2.0 * L.box().lo[axis]) / h;
        const double r = std::round(t);
        if (std::abs(t - r) > 1e-8) throw InvalidArgument("plane position is not reflection-aligned with the lattice");
        return static_cast<int>(r);
    };

    std::vector<std::size_t> nodes;
    for (std::size_t l = 0; l < L.size(); ++l)
        if (domain.contains(L.node(l))) nodes.push_back(l);

    PlaneSweepReport rep;
    rep.direction = direction;
    rep.center = center;
    rep.tol = tol;
    rep.monotone = true;
    for (double lambda : lambdas) {
        const int shift = mirror_shift(lambda);
        PlaneRecord rec;
        rec.lambda = lambda;
        rec.min_w = kInf;
        double u_lam = 0.0, u_x = 0.0;
        for (std::size_t l : nodes) {
            const Point x = L.node(l);
            if (!(sign * x[axis] < lambda - 1e-12 * h)) continue;
            Index j = L.multi(l);
            j[axis] = shift - j[axis];
            const double ul = value_at(u, j);
            const double w = ul - u.at(l);
            Index jj = j;
            jj[axis] = shift - j[axis];
            rep.antisymmetry_defect = std::max(rep.antisymmetry_defect, std::abs(w + (value_at(u, jj) - ul)));
            ++rec.nodes;
            if (w < rec.min_w) {
                rec.min_w = w;
                rec.argmin = x;
                u_lam = ul;
                u_x = u.at(l);
            }
        }
        if (rec.nodes > 0 && f && std::abs(u_lam - u_x) > 1e-12) rec.c = -((*f)(u_lam) - (*f)(u_x)) / (u_lam - u_x);
        if (rec.nodes > 0 && lambda < center && rec.min_w < -tol) rep.monotone = false;
        rep.records.push_back(rec);
    }

    const int shift0 = mirror_shift(center);
    for (std::size_t l : nodes) {
        Index j = L.multi(l);
        j[axis] = shift0 - j[axis];
        rep.reflection_deviation = std::max(rep.reflection_deviation, std::abs(value_at(u, j) - u.at(l)));
    }
    rep.symmetric = rep.monotone && rep.reflection_deviation <= tol;
    return rep;
}

SlideReport sliding_sweep(const GridFunction& u, const Geometry& domain, std::span<const double> taus, double tol,
                          std::optional<double> probe_top) {
    const Lattice& L = u.lattice();
    const int n = L.dim();
    SlideReport rep;
    rep.tol = tol;
    rep.probe_top = probe_top.value_or(domain.height);
    rep.monotone = true;
    for (double tau : taus) {
        if (!(tau >= 0.0)) throw InvalidArgument("sliding shifts must be nonnegative");
        if (tau >= domain.height) throw InvalidArgument("sliding shift exceeds the slab height");
        SlideRecord rec;
        rec.tau = tau;
        rec.min_w = kInf;
        for (std::size_t l = 0; l < L.size(); ++l) {
            const Point x = L.node(l);
            if (!domain.contains(x) || x[n - 1] > rep.probe_top + 1e-12) continue;
            Point y = x;
            y[n - 1] += tau;
            const double w = u(y) - u.at(l);
            ++rec.nodes;
            if (w < rec.min_w) {
                rec.min_w = w;
                rec.argmin = x;
            }
        }
        if (rec.nodes > 0 && rec.min_w < -tol) rep.monotone = false;
        rep.records.push_back(rec);
    }
    return rep;
}

SlideTruncation sliding_truncation_study(const ProblemSpec& strip, std::span<const double> taus, double tol,
                                         double probe_top, const SolveOptions& options) {
    if (strip.geometry.kind != Geometry::Kind::strip && strip.geometry.kind != Geometry::Kind::epigraph)
        throw InvalidArgument("truncation study needs a strip or epigraph problem");
    ProblemSpec doubled = strip;
    doubled.geometry.height = 2.0 * strip.geometry.height;
    if (strip.exterior.kind() == ExteriorRule::Kind::layered) {
        LayeredData lay = strip.exterior.as_layered();
        if (lay.upper == strip.geometry.height) lay.upper = doubled.geometry.height;
        doubled.exterior = ExteriorRule::layered(lay);
    }
    // Pin both solves to the same far radius so only the slab height changes.
    if (!(doubled.scheme.far_radius > 0.0) && !(doubled.config.far_radius > 0.0)) {
        const double R = doubled.resolved_scheme().far_radius;
        doubled.scheme.far_radius = R;
    }
    ProblemSpec base = strip;
    base.scheme.far_radius = doubled.resolved_scheme().far_radius;

    SlideTruncation out;
    const SolveResult a = solve_dirichlet(base, options);
    const SolveResult b = solve_dirichlet(doubled, options);
    out.base_solve = a.report;
    out.doubled_solve = b.report;
    out.base_max_abs = a.u.max_abs();
    out.base = sliding_sweep(a.u, base.geometry, taus, tol, probe_top);
    out.doubled = sliding_sweep(b.u, doubled.geometry, taus, tol, probe_top);

    double tau_max = 0.0;
    for (double t : taus) tau_max = std::max(tau_max, t);
    const Lattice& L = a.u.lattice();
    const int n = L.dim();
    for (std::size_t l = 0; l < L.size(); ++l) {
        const Point x = L.node(l);
        if (!base.geometry.contains(x) || x[n - 1] > probe_top + tau_max + 1e-12) continue;
        out.error_bar = std::max(out.error_bar, std::abs(a.u.at(l) - b.u(x)));
    }
    for (std::size_t k = 0; k < out.base.records.size(); ++k)
        out.max_min_change = std::max(out.max_min_change,
                                      std::abs(out.base.records[k].min_w - out.doubled.records[k].min_w));
    out.within_bar = out.max_min_change <= 2.0 * out.error_bar;
    return out;
}

RadialReport radial_symmetry_check(const GridFunction& u, const Point& center, double max_radius) {
    const Lattice& L = u.lattice();
    const int n = L.dim();
    const double h = L.spacing();
    std::map<long long, std::pair<double, double>> orbits;
    std::map<long long, double> orbit_radius;
    std::map<long long, std::pair<double, std::size_t>> shells;
    for (std::size_t l = 0; l < L.size(); ++l) {
        const Point x = L.node(l);
        const double r = norm(x - center, n);
        if (r >= max_radius) continue;
        const double v = u.at(l);
        const long long key = std::llround(r * r / (h * h) * 1e6);
        auto it = orbits.find(key);
        if (it == orbits.end()) {
            orbits[key] = {v, v};
            orbit_radius[key] = r;
        } else {
            it->second.first = std::min(it->second.first, v);
            it->second.second = std::max(it->second.second, v);
        }
        auto& shell = shells[static_cast<long long>(std::floor(r / (0.5 * h)))];
        shell.first += v;
        shell.second += 1;
    }
    RadialReport rep;
    rep.orbits = orbits.size();
    for (const auto& [key, mm] : orbits) {
        const double spread = mm.second - mm.first;
        if (spread > rep.max_orbit_spread) {
            rep.max_orbit_spread = spread;
            rep.spread_radius = orbit_radius[key];
        }
    }
    for (const auto& [bin, acc] : shells) {
        rep.shell_radius.push_back((bin + 0.5) * 0.5 * h);
        rep.shell_mean.push_back(acc.first / static_cast<double>(acc.second));
    }
    for (std::size_t k = 1; k < rep.shell_mean.size(); ++k)
        rep.shell_violation = std::max(rep.shell_violation, rep.shell_mean[k] - rep.shell_mean[k - 1]);
    return rep;
}

double schrodinger_threshold(double p) {
    if (!(p > 1.0)) throw InvalidArgument("Schrodinger threshold needs p > 1");
    return std::pow(1.0 / p, 1.0 / (p - 1.0));
}

SchrodingerRecord schrodinger_threshold_check(const GridFunction& u, double p, std::span<const double> radii,
                                              const Geometry* domain, double tol) {
    SchrodingerRecord rec;
    rec.threshold = schrodinger_threshold(p);
    const Lattice& L = u.lattice();
    const int n = L.dim();
    for (double R : radii) {
        double sup = -kInf;
        for (std::size_t l = 0; l < L.size(); ++l)
            if (norm(L.node(l), n) > R) sup = std::max(sup, u.at(l));
        rec.radii.push_back(R);
        rec.sup_outside.push_back(sup);
    }
    rec.limsup_estimate = rec.sup_outside.empty() ? u.max_abs() : rec.sup_outside.back();
    rec.hypothesis_holds = rec.limsup_estimate < rec.threshold;
    if (domain) {
        const Nonlinearity f = Nonlinearity::schrodinger_power(p);
        for (int d = 0; d < n; ++d) {
            Point dir{};
            dir[d] = 1.0;
            const double extent = 0.5 * L.box().edge(d);
            const auto lambdas = half_grid_lambdas(L, d, 0.0, extent);
            rec.sweeps.push_back(moving_planes_sweep(u, *domain, dir, lambdas, &f, tol, 0.0));
        }
    }
    return rec;
}

AsymptoticReport asymptotic_sweep(const GridFunction& u, const Geometry& domain, const Nonlinearity& f, double M0,
                                  double bin_width, double truncation_error, double range_max) {
    if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be positive");
    AsymptoticReport rep;
    rep.M0 = M0;
    rep.truncation_error = truncation_error;
    const HypothesisReport hyp = hypothesis_report(f, range_max);
    rep.applicable = hyp.h1.applicable && hyp.h1.holds && hyp.h2.holds && hyp.h3.applicable && hyp.h3.holds;
    rep.mu = f.mu.value_or(0.0);

    const Lattice& L = u.lattice();
    const int n = L.dim();
    std::map<long long, AsymptoticBin> bins;
    const double tol = truncation_error + 1e-9;
    rep.within_range = true;
    for (std::size_t l = 0; l < L.size(); ++l) {
        const Point x = L.node(l);
        if (!domain.contains(x)) continue;
        const double dist = domain.height_above_floor(x);
        const double v = u.at(l);
        if (v < -tol || v > rep.mu + tol) rep.within_range = false;
        const long long b = static_cast<long long>(std::floor(dist / bin_width));
        auto it = bins.find(b);
        if (it == bins.end()) {
            bins[b] = AsymptoticBin{b * bin_width, (b + 1) * bin_width, 1, v, v};
        } else {
            it->second.count += 1;
            it->second.min = std::min(it->second.min, v);
            it->second.max = std::max(it->second.max, v);
        }
    }
    for (const auto& [b, bin] : bins) rep.bins.push_back(bin);

    rep.monotone_beyond_M0 = true;
    double prev = -kInf;
    for (const auto& bin : rep.bins) {
        if (bin.lo < M0) continue;
        if (bin.min < prev - truncation_error - 1e-12) rep.monotone_beyond_M0 = false;
        prev = std::max(prev, bin.min);
    }
    if (!rep.bins.empty()) rep.near_mu = rep.bins.back().min >= rep.mu - f.delta1;

    // eps0 = min(delta0, inf over B_{M0}(y0) of u / 2) for a centre y0 deeper than M0.
    Point y0{};
    y0[n - 1] = domain.floor_at(y0) + M0 + 0.5 * (domain.height - domain.floor_at(y0) - M0);
    if (domain.height - domain.floor_at(y0) > 2.0 * M0) {
        double inf = kInf;
        for (std::size_t l = 0; l < L.size(); ++l) {
            const Point x = L.node(l);
            if (norm(x - y0, n) < M0) inf = std::min(inf, u.at(l));
        }
        if (std::isfinite(inf)) rep.eps0 = std::min(f.delta0, 0.5 * inf);
    }
    return rep;
}

MaLimitTable ma_limit_sweep(const AnalyticFunction& u, std::span<const double> s_list, std::span<const Point> points,
                            double theta, const MaLimitOptions& options) {
    const int n = u.dim();
    MaLimitTable table;
    table.points.assign(points.begin(), points.end());
    for (const Point& x : points) {
        const Mat H = u.hessian(x);
        Eigen::SelfAdjointEigenSolver<Mat> eig(H, Eigen::EigenvaluesOnly);
        if (!(eig.eigenvalues().minCoeff() > 0.0))
            throw InvalidArgument("Monge-Ampere limit needs a convex function; Hessian is not positive definite at " +
                                  to_string(x, n));
        table.hessian_root.push_back(std::pow(eig.eigenvalues().prod(), 1.0 / n));
    }
    const GridFunction gf = make_grid_function(Box::cube(n, options.half_width), options.h, u);
    ControlSetSpec spec;
    spec.kind = ControlKind::monge_ampere;
    spec.n = n;
    spec.theta = theta;
    spec.Theta = std::pow(theta, 1 - n);
    spec.eig_resolution = options.eig_resolution;
    spec.angle_resolution = options.angle_resolution;
    const ControlSet controls = build_control_set(spec);
    for (double s : s_list) {
        OperatorConfig config;
        config.n = n;
        config.s = s;
        config.theta = theta;
        config.Theta = spec.Theta;
        const QuadratureScheme scheme = QuadratureScheme::resolve(config, options.h, gf.lattice().box().diameter());
        const BellmanEvaluator ev(controls, config, scheme);
        MaLimitRow row;
        row.s = s;
        std::vector<double> ratios(points.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(points.size()); ++k)
            ratios[static_cast<std::size_t>(k)] = (1.0 - s) * ev.infimum(gf, points[static_cast<std::size_t>(k)]).value /
                                                  table.hessian_root[static_cast<std::size_t>(k)];
        row.ratios = ratios;
        double lo = kInf, hi = -kInf, sum = 0.0;
        for (double r : ratios) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            sum += r;
        }
        row.mean = sum / static_cast<double>(ratios.size());
        row.spread = (hi - lo) / std::abs(row.mean);
        table.rows.push_back(row);
    }
    if (table.rows.size() >= 2) table.spread_shrinks = table.rows.back().spread <= 0.5 * table.rows.front().spread;
    return table;
}

DecayFit decay_exponent_fit(const ControlSet& controls, const OperatorConfig& config, std::span<const double> radii,
                            const DecayOptions& options) {
    const int n = config.n;
    for (double r : radii)
        if (!(r >= 2.0)) throw InvalidArgument("decay radii must be at least 2 (outside the bump support)");
    AnalyticTerm bump;
    bump.tag = Tag::bump;
    const GridFunction psi = make_grid_function(Box::cube(n, options.half_width), options.h,
                                                AnalyticFunction::single(n, bump));
    QuadratureScheme base;
    base.angular = 256;
    base.radial_panels_per_log = 24.0;
    const QuadratureScheme scheme =
        QuadratureScheme::resolve(config, options.h, psi.lattice().box().diameter(), base);
    const BellmanEvaluator ev(controls, config, scheme);

    DecayFit fit;
    std::vector<double> values(radii.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(radii.size()); ++k) {
        Point x{};
        x[0] = radii[static_cast<std::size_t>(k)];
        values[static_cast<std::size_t>(k)] = ev.infimum(psi, x).value;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        fit.radii.push_back(radii[k]);
        fit.values.push_back(values[k]);
        if (!(std::abs(values[k]) > options.noise_floor)) {
            ++fit.excluded;
            continue;
        }
        const double lx = std::log(radii[k]), ly = std::log(std::abs(values[k]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) throw EvaluationError("too few decay samples above the noise floor");
    const double md = static_cast<double>(m);
    fit.slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / md;

    // Boundedness: sup |F_s psi| on a coarse grid around the support.
    const double reach = 3.0;
    const int steps = static_cast<int>(std::floor(reach / options.sup_spacing));
    std::vector<Point> grid;
    if (n == 2) {
        for (int i = -steps; i <= steps; ++i)
            for (int j = -steps; j <= steps; ++j) grid.push_back({i * options.sup_spacing, j * options.sup_spacing, 0.0});
    } else {
        for (int i = -steps; i <= steps; ++i)
            for (int j = -steps; j <= steps; ++j)
                for (int k = -steps; k <= steps; ++k)
                    grid.push_back({i * options.sup_spacing, j * options.sup_spacing, k * options.sup_spacing});
    }
    std::vector<double> sup(grid.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(grid.size()); ++k)
        sup[static_cast<std::size_t>(k)] = std::abs(ev.infimum(psi, grid[static_cast<std::size_t>(k)]).value);
    for (double v : sup) fit.sup_abs = std::max(fit.sup_abs, v);
    return fit;
}

DecayProbe decay_probe_point(const Point& x, double c, const ControlSet& controls, const OperatorConfig& config) {
    DecayProbe p;
    p.x = x;
    p.c = c;
    const double r2s = std::pow(norm(x, config.n), 2.0 * config.s);
    p.scaled_c = r2s * c;
    p.threshold = -reflection_mass(x, Plane{0, 0.0}, controls, config) * r2s / 4.0;
    p.margin = p.scaled_c - p.threshold;
    p.satisfied = p.margin > 0.0;
    return p;
}

double decay_threshold_bisect(const Point& x, const ControlSet& controls, const OperatorConfig& config, double K_hi,
                              double tol) {
    const double r2s = std::pow(norm(x, config.n), 2.0 * config.s);
    auto satisfied = [&](double K) { return decay_probe_point(x, -K / r2s, controls, config).satisfied; };
    double lo = 0.0, hi = K_hi;
    if (satisfied(hi)) return hi;
    while (hi - lo > tol * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (satisfied(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace nlb
