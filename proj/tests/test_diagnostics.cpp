#include <doctest.h>

#include <cmath>

#include "nlbellman/config.hpp"
#include "nlbellman/diagnostics.hpp"
#include "nlbellman/error.hpp"
#include "nlbellman/grid_function.hpp"

using namespace nlb;

namespace {

AnalyticFunction tagged(Tag tag, Point center = {}, double amplitude = 1.0) {
    AnalyticTerm t;
    t.tag = tag;
    t.center = center;
    t.amplitude = amplitude;
    return AnalyticFunction::single(2, t);
}

OperatorConfig cfg(double s) {
    OperatorConfig c;
    c.s = s;
    c.theta = 0.5;
    c.Theta = 2.0;
    return c;
}

ControlSet identity_set() { return build_control_set(ControlSetSpec{}); }

}  // namespace

TEST_CASE("moving planes on an exact radial function") {
    const GridFunction u = make_grid_function(Box::cube(2, 1.5), 0.05, tagged(Tag::gaussian));
    const Geometry ball = Geometry::ball(2, 1.0);
    const auto lambdas = half_grid_lambdas(u.lattice(), 0, 0.0, 1.0);
    CHECK(lambdas.size() == 40);
    CHECK(lambdas.front() == doctest::Approx(-1.0));
    // Node coordinates lo + i h are mirror images only up to rounding.
    const PlaneSweepReport r = moving_planes_sweep(u, ball, {1, 0, 0}, lambdas, nullptr, 1e-14);
    for (const PlaneRecord& rec : r.records)
        if (rec.nodes > 0) CHECK(rec.min_w >= -1e-14);
    CHECK(r.antisymmetry_defect <= 1e-14);
    CHECK(r.reflection_deviation <= 1e-14);
    CHECK(r.symmetric);
}

TEST_CASE("moving planes detect an off-centre Gaussian; minima match a brute-force scan") {
    const GridFunction u = make_grid_function(Box::cube(2, 1.5), 0.05, tagged(Tag::gaussian, {-0.3, 0, 0}));
    const Geometry ball = Geometry::ball(2, 1.0);
    const auto lambdas = half_grid_lambdas(u.lattice(), 0, 0.0, 1.0);
    const Nonlinearity f = Nonlinearity::power(2.0);
    const PlaneSweepReport r = moving_planes_sweep(u, ball, {1, 0, 0}, lambdas, &f, 1e-6);
    CHECK_FALSE(r.monotone);
    CHECK_FALSE(r.symmetric);

    // Brute force: every (lambda, node) pair with reflections evaluated in closed form.
    const AnalyticFunction g = tagged(Tag::gaussian, {-0.3, 0, 0});
    const Lattice& lat = u.lattice();
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        double best = INFINITY;
        for (std::size_t l = 0; l < lat.size(); ++l) {
            const Point x = lat.node(l);
            if (!ball.contains(x) || !(x[0] < lambdas[k] - 1e-12)) continue;
            const double w = g({2.0 * lambdas[k] - x[0], x[1], 0}) - g(x);
            best = std::min(best, w);
        }
        if (!std::isfinite(best)) continue;
        CHECK(r.records[k].min_w == doctest::Approx(best).epsilon(1e-12));
        // The data are even in x_2, so compare the value at the argmin rather than its position.
        const Point a = r.records[k].argmin;
        CHECK(g({2.0 * lambdas[k] - a[0], a[1], 0}) - g(a) == doctest::Approx(best).epsilon(1e-12));
        if (best < -1e-12) {
            const double ux = g(a), ul = ux + best;
            CHECK(r.records[k].c == doctest::Approx(-(ul * ul - ux * ux) / (ul - ux)));
        }
    }
    CHECK_THROWS_AS(moving_planes_sweep(u, ball, {1, 0, 0}, std::vector<double>{-0.51 + 1e-3}, nullptr, 0.0),
                    InvalidArgument);
    CHECK_THROWS_AS(moving_planes_sweep(u, ball, {0.6, 0.8, 0}, lambdas, nullptr, 0.0), InvalidArgument);
}

TEST_CASE("sliding sweeps") {
    AnalyticTerm t;
    t.tag = Tag::linear_cap;
    t.amplitude = 0.0;
    t.slope = 1.0;
    t.axis = 1;
    const Geometry strip = Geometry::strip(2, 4.0, 2.0);
    Box box;
    box.lo = {-2.5, -0.5, 0};
    box.hi = {2.5, 4.5, 0};
    const GridFunction u = make_grid_function(box, 0.125, AnalyticFunction::single(2, t));
    const SlideReport r = sliding_sweep(u, strip, std::vector<double>{0.0, 0.5}, 1e-12);
    CHECK(r.records[0].min_w == 0.0);
    CHECK(r.records[1].min_w == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.monotone);
    CHECK_THROWS_AS(sliding_sweep(u, strip, std::vector<double>{-0.1}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(sliding_sweep(u, strip, std::vector<double>{4.0}, 0.0), InvalidArgument);
}

TEST_CASE("radial symmetry check") {
    const GridFunction u = make_grid_function(Box::cube(2, 1.5), 0.05, tagged(Tag::gaussian));
    const RadialReport r = radial_symmetry_check(u, {}, 1.0);
    CHECK(r.max_orbit_spread <= 1e-15);
    CHECK(r.shell_violation == 0.0);
    CHECK(r.orbits > 100);
    const GridFunction v = make_grid_function(Box::cube(2, 1.5), 0.05, tagged(Tag::gaussian, {0.05, 0, 0}));
    CHECK(radial_symmetry_check(v, {}, 1.0).max_orbit_spread > 1e-3);
}

TEST_CASE("Schrodinger threshold") {
    CHECK(schrodinger_threshold(2.0) == doctest::Approx(0.5));
    CHECK(schrodinger_threshold(3.0) == doctest::Approx(std::sqrt(1.0 / 3.0)));
    AnalyticTerm c;
    c.tag = Tag::constant;
    const GridFunction one = make_grid_function(Box::cube(2, 2.0), 0.1, AnalyticFunction::single(2, c));
    const Geometry ball = Geometry::ball(2, 1.5);
    const SchrodingerRecord rec = schrodinger_threshold_check(one, 2.0, std::vector<double>{0.5, 1.0, 1.5}, &ball, 1e-12);
    CHECK(rec.limsup_estimate == 1.0);
    CHECK_FALSE(rec.hypothesis_holds);
    CHECK(rec.sweeps.size() == 2);
    CHECK(rec.sweeps[0].symmetric);
}

TEST_CASE("asymptotic sweep on manufactured data") {
    AnalyticTerm c;
    c.tag = Tag::constant;
    c.amplitude = 1.0;
    Box box;
    box.lo = {-2.5, -0.5, 0};
    box.hi = {2.5, 8.5, 0};
    const GridFunction mu = make_grid_function(box, 0.125, AnalyticFunction::single(2, c));
    const Geometry strip = Geometry::strip(2, 8.0, 2.0);
    const AsymptoticReport r = asymptotic_sweep(mu, strip, Nonlinearity::de_giorgi(), 1.0, 1.0, 0.0);
    CHECK(r.applicable);
    CHECK(r.mu == 1.0);
    CHECK(r.within_range);
    CHECK(r.near_mu);
    CHECK(r.monotone_beyond_M0);
    for (const AsymptoticBin& b : r.bins) {
        CHECK(b.min == 1.0);
        CHECK(b.max == 1.0);
    }
    CHECK(r.eps0 == doctest::Approx(0.5));
    CHECK_FALSE(asymptotic_sweep(mu, strip, Nonlinearity::power(2.0), 1.0, 1.0).applicable);
}

TEST_CASE("Monge-Ampere limit table") {
    const std::vector<Point> pts{{0, 0, 0}, {0.5, 0.2, 0}};
    MaLimitOptions o;
    o.eig_resolution = 9;
    o.angle_resolution = 8;
    const MaLimitTable t = ma_limit_sweep(tagged(Tag::sqrt_quadratic), std::vector<double>{0.7, 0.95}, pts, 0.5, o);
    CHECK(t.hessian_root[0] == doctest::Approx(1.0));
    CHECK(t.rows.size() == 2);
    CHECK(t.rows[1].spread < t.rows[0].spread);
    CHECK_THROWS_AS(ma_limit_sweep(tagged(Tag::gaussian), std::vector<double>{0.7}, pts, 0.5, o), InvalidArgument);
}

TEST_CASE("bump decay exponent and fit stability") {
    std::vector<double> near, far;
    for (int k = 0; k < 6; ++k) {
        near.push_back(3.0 * std::pow(10.0 / 3.0, k / 5.0));
        far.push_back(6.0 * std::pow(20.0 / 6.0, k / 5.0));
    }
    const DecayFit a = decay_exponent_fit(identity_set(), cfg(0.5), near);
    CHECK(a.slope == doctest::Approx(-3.0).epsilon(0.05));
    CHECK(std::isfinite(a.sup_abs));
    CHECK(a.sup_abs > 0.0);
    for (double v : a.values) CHECK(v > 0.0);
    DecayOptions wide;
    wide.half_width = 24.0;
    const DecayFit b = decay_exponent_fit(identity_set(), cfg(0.5), far, wide);
    CHECK(std::abs(a.slope - b.slope) <= 0.05);
}

TEST_CASE("decay threshold probe") {
    const ControlSet set = identity_set();
    const OperatorConfig c = cfg(0.5);
    const std::vector<Point> pts{{3, 0, 0}, {5, 1, 0}, {-8, 2, 0}};
    for (const DecayProbe& p : decay_threshold_probe([](const Point&) { return 0.0; }, pts, set, c)) {
        CHECK(p.margin > 0.0);
        CHECK(p.satisfied);
    }
    const AnalyticFunction g = tagged(Tag::gaussian);
    const auto probes = decay_threshold_probe([&](const Point& x) { return 1.0 - 2.0 * g(x); }, pts, set, c);
    for (const DecayProbe& p : probes) CHECK(p.satisfied);
    CHECK(probes[2].scaled_c > probes[0].scaled_c);

    const Point x{4, 0, 0};
    const double K = decay_threshold_bisect(x, set, c);
    const double expected = reflection_mass(x, Plane{0, 0.0}, set, c) * std::pow(4.0, 2.0 * c.s) / 4.0;
    CHECK(K == doctest::Approx(expected).epsilon(1e-8));
    const double decay = std::pow(4.0, -2.0 * c.s);
    CHECK(decay_probe_point(x, -0.9 * K * decay, set, c).satisfied);
    CHECK_FALSE(decay_probe_point(x, -1.1 * K * decay, set, c).satisfied);
}
