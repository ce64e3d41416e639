#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "nlbellman/config.hpp"
#include "nlbellman/controls.hpp"
#include "nlbellman/diagnostics.hpp"
#include "nlbellman/error.hpp"
#include "nlbellman/grid_function.hpp"
#include "nlbellman/quadrature.hpp"
#include "nlbellman/solver.hpp"
#include "oracle.hpp"

namespace nlb::acceptance {

namespace {

// Pinned tolerances and budgets.
constexpr double kOracleRel = 1e-2;          // 1: production vs Fourier oracle
constexpr double kOracleCross = 5e-3;        // 1: direct vs Fourier oracle
constexpr double kComparisonRel = 1e-3;      // 2
constexpr double kSuperadditiveRel = 1e-3;   // 3
constexpr double kDecaySlope = 0.15;         // 4
constexpr double kHomogeneityRel = 1e-2;     // 5
constexpr double kBallResidual = 1e-6;       // 6, times |f|
constexpr double kOrbitSpread = 5.0;         // 6, times h |u|
constexpr double kShellViolation = 1e-3;     // 6, times |u|
constexpr double kPlaneTol = 5.0;            // 6, times h |u|
constexpr double kLiouville = 1e-8;          // 7
constexpr double kEigenResidual = 1e-4;      // 8, times lambda
constexpr double kEigenScaling = 5e-2;       // 8
constexpr double kEigenDense = 5e-3;         // 8
constexpr double kSlideTol = 5.0;            // 9, times h |u|
constexpr double kMaShrink = 0.5;            // 10
constexpr double kRefineGap = 1e-2;          // 11
constexpr double kRefineOrder = 1e-12;       // 11, roundoff allowance in units of |F|

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

OperatorConfig config2(double s, double theta = 0.5, double Theta = 2.0) {
    OperatorConfig c;
    c.n = 2;
    c.s = s;
    c.theta = theta;
    c.Theta = Theta;
    return c;
}

ControlSetSpec bellman_spec(double theta = 0.5, double Theta = 2.0) {
    ControlSetSpec spec;
    spec.kind = ControlKind::bellman_box;
    spec.n = 2;
    spec.theta = theta;
    spec.Theta = Theta;
    return spec;
}

AnalyticFunction tagged(Tag tag, double amplitude = 1.0, Point center = {}, double width = 1.0) {
    AnalyticTerm t;
    t.tag = tag;
    t.amplitude = amplitude;
    t.center = center;
    t.width = width;
    return AnalyticFunction::single(2, t);
}

struct Check {
    bool pass = true;
    std::ostringstream text;

    void limit(const std::string& what, double measured, double bound, bool upper = true) {
        const bool ok = upper ? measured <= bound : measured >= bound;
        pass = pass && ok;
        if (text.tellp() > 0) text << "; ";
        text << what << ' ' << sci(measured) << (upper ? " <= " : " >= ") << sci(bound);
    }
    void flag(const std::string& what, bool ok) {
        pass = pass && ok;
        if (text.tellp() > 0) text << "; ";
        text << what << ' ' << (ok ? "yes" : "no");
    }
    void note(const std::string& what) {
        if (text.tellp() > 0) text << "; ";
        text << what;
    }
};

// 1. Production fractional Laplacian of the Gaussian against the Fourier and direct oracles.
Check oracle_agreement(const RunOptions& o) {
    Check c;
    OperatorConfig cfg = config2(0.5, 1.0, 1.0);
    cfg.c_ns = fractional_laplacian_constant(2, 0.5) * o.mutation.c_ns_factor;
    const AnalyticFunction g = tagged(Tag::gaussian);
    const double h = 0.05;
    const GridFunction u = make_grid_function(Box::cube(2, 2.0), h, g);
    const QuadratureScheme scheme = QuadratureScheme::resolve(cfg, h, u.lattice().box().diameter());
    const std::vector<Point> pts{{0, 0, 0}, {0.5, 0, 0}, {0.3, 0.4, 0}, {-0.8, 0.2, 0}, {0.2, -0.6, 0}};
    double worst = 0.0, cross = 0.0;
    for (const Point& x : pts) {
        const double fourier = oracle::frac_laplacian_fourier(g, x, 0.5);
        const double direct = oracle::frac_laplacian_direct(g, x, 0.5);
        const double value = eval_fractional_laplacian(u, x, cfg, scheme).value;
        worst = std::max(worst, std::abs(value - fourier) / std::abs(fourier));
        cross = std::max(cross, std::abs(direct - fourier) / std::abs(fourier));
    }
    c.limit("max rel err vs Fourier", worst, kOracleRel / o.tighten);
    c.limit("direct vs Fourier", cross, kOracleCross / o.tighten);
    return c;
}

// 2. -F_s u >= (1 / C_{n,s}) (-Delta)^s u - 1e-3 scale on three tags.
Check comparison(const RunOptions& o) {
    Check c;
    const double s = 0.6, h = 0.05;
    OperatorConfig cfg = config2(s);
    cfg.c_ns = fractional_laplacian_constant(2, s) * o.mutation.c_ns_factor;
    const double comparison_constant = 1.0 / fractional_laplacian_constant(2, s);
    const ControlSet controls = build_control_set(bellman_spec());
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Point> pts(20);
    for (Point& p : pts) p = {unit(rng), unit(rng), 0.0};
    double worst_ratio = -1e300;
    for (Tag tag : {Tag::gaussian, Tag::bump, Tag::sqrt_quadratic}) {
        const GridFunction u = make_grid_function(Box::cube(2, 3.0), h, tagged(tag));
        const QuadratureScheme scheme = QuadratureScheme::resolve(cfg, h, u.lattice().box().diameter());
        const BellmanEvaluator ev(controls, cfg, scheme);
        std::vector<double> lhs, rhs;
        double scale = 0.0;
        for (const Point& x : pts) {
            const double frac = eval_fractional_laplacian(u, x, cfg, scheme).value;
            lhs.push_back(-ev.infimum(u, x).value);
            rhs.push_back(comparison_constant * frac);
            scale = std::max(scale, std::abs(frac));
        }
        double violation = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) violation = std::max(violation, rhs[k] - lhs[k]);
        worst_ratio = std::max(worst_ratio, violation / scale);
    }
    c.limit("max violation / scale", worst_ratio, kComparisonRel / o.tighten);
    return c;
}

// 3. F_s(u + v) >= F_s u + F_s v on random tagged pairs.
Check superadditivity(const RunOptions& o) {
    Check c;
    const double s = 0.6, h = 0.05;
    const OperatorConfig cfg = config2(s);
    const ControlSet controls = build_control_set(bellman_spec());
    const Box box = Box::cube(2, 3.0);
    const QuadratureScheme scheme = QuadratureScheme::resolve(cfg, h, box.diameter());
    const BellmanEvaluator ev(controls, cfg, scheme);
    std::mt19937_64 rng(o.seed + 3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 2);
    const Tag tags[] = {Tag::gaussian, Tag::bump, Tag::sqrt_quadratic};
    auto random_function = [&] {
        return tagged(tags[pick(rng)], 2.0 * unit(rng), {0.5 * unit(rng), 0.5 * unit(rng), 0.0},
                      1.0 + 0.5 * unit(rng));
    };
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < 50; ++k) {
        const AnalyticFunction a = random_function(), b = random_function();
        const Point x{unit(rng), unit(rng), 0.0};
        const GridFunction ua = make_grid_function(box, h, a), ub = make_grid_function(box, h, b);
        const GridFunction uab = make_grid_function(box, h, a + b);
        const double fa = ev.infimum(ua, x).value, fb = ev.infimum(ub, x).value, fab = ev.infimum(uab, x).value;
        worst = std::max(worst, fa + fb - fab);
        scale = std::max({scale, std::abs(fa), std::abs(fb), std::abs(fab)});
    }
    c.limit("max violation / scale", worst / scale, kSuperadditiveRel / o.tighten);
    return c;
}

// 4. |F_s psi| ~ |x|^{-(n + 2s)} for the bump.
Check bump_decay(const RunOptions& o) {
    Check c;
    std::vector<double> radii;
    for (int k = 0; k < 8; ++k) radii.push_back(3.0 * std::pow(10.0 / 3.0, k / 7.0));
    double worst = 0.0, sup = 0.0;
    for (double s : {0.3, 0.5, 0.7}) {
        for (ControlKind kind : {ControlKind::singleton_identity, ControlKind::bellman_box}) {
            ControlSetSpec spec = bellman_spec();
            spec.kind = kind;
            const DecayFit fit = decay_exponent_fit(build_control_set(spec), config2(s), radii);
            worst = std::max(worst, std::abs(fit.slope + 2.0 + 2.0 * s));
            sup = std::max(sup, fit.sup_abs);
        }
    }
    c.limit("max |slope + n + 2s|", worst, kDecaySlope / o.tighten);
    c.flag("sup |F_s psi| finite (" + sci(sup) + ")", std::isfinite(sup));
    return c;
}

// 5. reflection_mass(d) d^{2s} is dilation invariant.
Check reflection_homogeneity(const RunOptions& o) {
    Check c;
    double worst = 0.0;
    for (double s : {0.3, 0.5, 0.7}) {
        const OperatorConfig cfg = config2(s);
        const ControlSet controls = build_control_set(bellman_spec());
        std::vector<double> scaled;
        for (double d : {0.5, 1.0, 2.0, 4.0})
            scaled.push_back(reflection_mass({d, 0.3 * d, 0.0}, Plane{0, 0.0}, controls, cfg) * std::pow(d, 2.0 * s));
        const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
        worst = std::max(worst, (*hi - *lo) / *lo);
    }
    c.limit("max relative variation", worst, kHomogeneityRel / o.tighten);
    return c;
}

ProblemSpec ball_problem() {
    ProblemSpec p;
    p.geometry = Geometry::ball(2, 1.0);
    p.config = config2(0.5);
    p.controls = bellman_spec();
    p.f = Nonlinearity::constant(1.0);
    p.exterior = ExteriorRule::zero();
    p.h = 1.0 / 40.0;
    return p;
}

// 6. Ball problem: residual, radial orbits, shells and moving planes.
Check ball_symmetry(const RunOptions& o) {
    Check c;
    ProblemSpec p = ball_problem();
    if (o.mutation.coarse_central_stencil) {
        p.near_stencil = NearStencil::central;
        p.check_monotone = false;
        p.scheme.near_radius = o.mutation.coarse_near_radius;
        c.note("mutated: central stencil, near radius " + sci(o.mutation.coarse_near_radius));
    }
    const SolveResult res = solve_dirichlet(p);
    const double unorm = res.u.max_abs();
    const double h = p.h;
    const double residual = res.report.residual_history.empty() ? INFINITY : res.report.residual_history.back();
    c.flag("converged", res.report.converged);
    c.limit("residual", residual, kBallResidual / o.tighten);
    const RadialReport rad = radial_symmetry_check(res.u, {}, 1.0);
    c.limit("orbit spread", rad.max_orbit_spread, kOrbitSpread * h * unorm / o.tighten);
    c.limit("shell violation", rad.shell_violation, kShellViolation * unorm / o.tighten);
    bool symmetric = true;
    for (int axis = 0; axis < 2; ++axis) {
        Point dir{};
        dir[axis] = 1.0;
        const auto lambdas = half_grid_lambdas(res.u.lattice(), axis, 0.0, 1.0);
        symmetric = symmetric &&
                    moving_planes_sweep(res.u, p.geometry, dir, lambdas, &p.f, kPlaneTol * h * unorm / o.tighten, 0.0)
                        .symmetric;
    }
    c.flag("moving planes symmetric in both axes", symmetric);
    return c;
}

// 7. Constant exterior reproduces the constant; ordered exterior data give ordered solutions.
Check liouville(const RunOptions& o) {
    Check c;
    ProblemSpec p;
    p.geometry = Geometry::ball(2, 1.0);
    p.config = config2(0.5);
    p.controls = bellman_spec();
    p.f = Nonlinearity::constant(0.0);
    p.h = 0.1;
    p.exterior = ExteriorRule::constant(0.7);
    const SolveResult flat = solve_dirichlet(p);
    double dev = 0.0;
    for (double v : flat.u.values()) dev = std::max(dev, std::abs(v - 0.7));
    c.limit("max |u - 0.7|", dev, kLiouville / o.tighten);

    const AnalyticFunction g1 = tagged(Tag::gaussian, 0.5, {1.2, 0.3, 0.0}, 0.7);
    const AnalyticFunction g2 = g1 + tagged(Tag::bump, 0.3, {-1.3, 0.0, 0.0}, 0.5);
    p.exterior = ExteriorRule::analytic(g1);
    const SolveResult a = solve_dirichlet(p);
    p.exterior = ExteriorRule::analytic(g2);
    const SolveResult b = solve_dirichlet(p);
    double worst = -INFINITY;
    for (std::size_t l = 0; l < a.u.values().size(); ++l) worst = std::max(worst, a.u.values()[l] - b.u.values()[l]);
    c.limit("max (u1 - u2)", worst, kLiouville / o.tighten);
    return c;
}

// Smallest eigenvalue of -L_I on the ball lattice from the dense assembled matrix.
double dense_eigen_oracle(double R, const OperatorConfig& cfg, double h) {
    const Geometry ball = Geometry::ball(2, R);
    ProblemSpec p;
    p.geometry = ball;
    p.config = cfg;
    p.h = h;
    const Lattice lat(p.sampling_box(), h);
    const Discretization disc(lat, ball, ExteriorRule::zero());
    const DiscreteOperator op =
        assemble(disc, ControlMatrix::identity(2), cfg, p.resolved_scheme(), NearStencil::selling, true);
    const std::size_t N = disc.unknowns();
    Eigen::MatrixXd M(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -op.coefficient(i, j);
    const Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

// 8. Principal eigenpair of -F_s on balls.
Check eigenpair(const RunOptions& o) {
    Check c;
    const double h = 0.1, s = 0.5;
    const OperatorConfig cfg = config2(s);
    const EigenPair e1 = eigenpair_ball(1.0, cfg, bellman_spec(), h);
    const EigenPair e2 = eigenpair_ball(2.0, cfg, bellman_spec(), h);
    // psi > 0 at every node inside the ball.
    auto positive = [](const EigenPair& e, double R) {
        const Geometry ball = Geometry::ball(2, R);
        for (std::size_t l = 0; l < e.psi.values().size(); ++l)
            if (ball.contains(e.psi.lattice().node(l)) && !(e.psi.values()[l] > 0.0)) return false;
        return true;
    };
    c.limit("lambda1(R=1)", e1.lambda1, 0.0, false);
    c.flag("psi > 0 inside", positive(e1, 1.0) && positive(e2, 2.0));
    c.limit("residual / lambda (R=1)", e1.residual / e1.lambda1, kEigenResidual / o.tighten);
    c.limit("residual / lambda (R=2)", e2.residual / e2.lambda1, kEigenResidual / o.tighten);
    const double ratio = e2.lambda1 / e1.lambda1;
    c.limit("|ratio / 2^{-2s} - 1|", std::abs(ratio / std::pow(2.0, -2.0 * s) - 1.0), kEigenScaling / o.tighten);
    ControlSetSpec single;
    single.kind = ControlKind::singleton_identity;
    const EigenPair es = eigenpair_ball(1.0, cfg, single, h);
    const double dense = dense_eigen_oracle(1.0, cfg, h);
    c.limit("singleton vs dense eigensolver", std::abs(es.lambda1 - dense) / dense, kEigenDense / o.tighten);
    c.note("C_{n,s} lambda1 singleton " + sci(es.lambda1 * fractional_laplacian_constant(2, s)));
    return c;
}

// 9. Sliding monotonicity on the strip with f(u) = exp(-u).
Check sliding(const RunOptions& o) {
    Check c;
    ProblemSpec p;
    p.geometry = Geometry::strip(2, 6.0, 3.0);
    p.config = config2(0.5);
    p.controls = bellman_spec();
    p.f = Nonlinearity::exponential(-1.0);
    p.exterior = ExteriorRule::layered({0.0, 6.0, 0.0, 0.0, 1.0});
    p.h = 1.0 / 8.0;
    const std::vector<double> taus{0.25, 0.5, 1.0};
    const SlideTruncation st = sliding_truncation_study(p, taus, 0.0, 3.0);
    const double unorm = st.base_max_abs;
    double worst = INFINITY;
    for (const SlideRecord& r : st.base.records) worst = std::min(worst, r.min_w);
    c.flag("both solves converged", st.base_solve.converged && st.doubled_solve.converged);
    c.limit("min w^tau", worst, -kSlideTol * p.h * unorm / o.tighten, false);
    c.limit("minima change under doubling", st.max_min_change, 2.0 * st.error_bar / o.tighten);
    return c;
}

// 10. (1 - s) D_s u / det(D^2 u)^{1/n} flattens across points as s -> 1.
Check monge_ampere_limit(const RunOptions& o) {
    Check c;
    const std::vector<Point> pts{{0, 0, 0}, {0.5, 0, 0}, {0, 0.8, 0}, {0.6, 0.6, 0}, {-1.0, 0.3, 0}};
    const std::vector<double> ss{0.6, 0.7, 0.8, 0.9, 0.95};
    const MaLimitTable t = ma_limit_sweep(tagged(Tag::sqrt_quadratic), ss, pts, 0.2);
    c.limit("spread(0.95) / spread(0.6)", t.rows.back().spread / t.rows.front().spread, kMaShrink / o.tighten);
    c.note("mean r(0.95) " + sci(t.rows.back().mean));
    return c;
}

// 11. Refining the control set lowers the infimum monotonically and converges.
Check refinement(const RunOptions& o) {
    Check c;
    const double h = 0.05;
    const OperatorConfig cfg = config2(0.5);
    const GridFunction u = make_grid_function(Box::cube(2, 3.0), h, tagged(Tag::gaussian));
    const QuadratureScheme scheme = QuadratureScheme::resolve(cfg, h, u.lattice().box().diameter());
    ControlSetSpec base = bellman_spec();
    base.eig_resolution = 5;
    base.angle_resolution = 8;
    const ControlSet s0 = build_control_set(base);
    const ControlSet s1 = refine(s0);
    const ControlSet s2 = refine(s1);
    const BellmanEvaluator e0(s0, cfg, scheme), e1(s1, cfg, scheme), e2(s2, cfg, scheme);
    const std::vector<Point> pts{{0, 0, 0}, {0.4, 0.1, 0}, {0.9, 0.0, 0}, {0.8, 0.8, 0}, {1.3, -0.4, 0}};
    double order = 0.0, gap = 0.0;
    for (const Point& x : pts) {
        const double f0 = e0.infimum(u, x).value, f1 = e1.infimum(u, x).value, f2 = e2.infimum(u, x).value;
        const double mag = std::max({std::abs(f0), std::abs(f1), std::abs(f2)});
        order = std::max({order, (f1 - f0) / mag, (f2 - f1) / mag});
        gap = std::max(gap, std::abs(f2 - f1) / std::abs(f2));
    }
    c.limit("max increase / |F|", order, kRefineOrder);
    c.limit("final gap / |F|", gap, kRefineGap / o.tighten);
    return c;
}

// 12. The mutated runs must fail criteria 2 and 6.
Check mutation(const RunOptions& o) {
    Check c;
    RunOptions m = o;
    m.mutation.c_ns_factor = 2.0;
    const Check two = comparison(m);
    c.flag("doubled C_{n,s} fails comparison", !two.pass);
    c.note("[" + two.text.str() + "]");
    m = o;
    m.mutation.coarse_central_stencil = true;
    const Check six = ball_symmetry(m);
    c.flag("central stencil with coarse near radius fails ball residual", !six.pass);
    c.note("[" + six.text.str() + "]");
    return c;
}

struct Entry {
    const char* name;
    double budget;
    Check (*run)(const RunOptions&);
};

const Entry kEntries[kCriteria] = {
    {"oracle agreement", 60, oracle_agreement},
    {"comparison inequality", 120, comparison},
    {"superadditivity", 120, superadditivity},
    {"bump decay", 180, bump_decay},
    {"reflection-mass homogeneity", 60, reflection_homogeneity},
    {"ball symmetry", 300, ball_symmetry},
    {"discrete Liouville and comparison", 60, liouville},
    {"eigenpair", 300, eigenpair},
    {"sliding monotonicity", 600, sliding},
    {"Monge-Ampere limit", 300, monge_ampere_limit},
    {"control-set refinement", 180, refinement},
    {"mutation sensitivity", 600, mutation},
};

}  // namespace

Result run_criterion(int id, const RunOptions& options) {
    if (id < 1 || id > kCriteria) throw InvalidArgument("acceptance criterion must be in 1.." + std::to_string(kCriteria));
    const Entry& e = kEntries[id - 1];
    Result r;
    r.id = id;
    r.name = e.name;
    r.budget_seconds = e.budget;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Check c = e.run(options);
        r.numeric_pass = c.pass;
        r.detail = c.text.str();
    } catch (const std::exception& ex) {
        r.numeric_pass = false;
        r.detail = std::string("error: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<Result> run(std::span<const int> ids, const RunOptions& options) {
    std::vector<Result> out;
    for (int id : ids) out.push_back(run_criterion(id, options));
    return out;
}

void print(std::ostream& os, const Result& r) {
    std::ostringstream line;
    line << "criterion " << std::setw(2) << r.id << ' ' << (r.pass() ? "PASS" : "FAIL") << "  " << r.name << " | "
         << r.detail << " | " << std::fixed << std::setprecision(1) << r.seconds << " s (budget "
         << std::setprecision(0) << r.budget_seconds << " s)";
    os << line.str() << '\n';
}

}  // namespace nlb::acceptance
