#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nlbellman/config.hpp"
#include "nlbellman/error.hpp"
#include "nlbellman/grid_function.hpp"
#include "nlbellman/nonlinearity.hpp"
#include "nlbellman/problem.hpp"
#include "oracle.hpp"

using namespace nlb;

namespace {

AnalyticFunction single(Tag tag, int dim = 2) {
    AnalyticTerm t;
    t.tag = tag;
    return AnalyticFunction::single(dim, t);
}

}  // namespace

TEST_CASE("lattice validates spacing and round-trips indices") {
    CHECK_THROWS_AS(Lattice(Box::cube(2, 1.0), 0.3), InvalidArgument);
    CHECK_THROWS_AS(Lattice(Box::cube(2, 1.0), -0.1), InvalidArgument);
    const Lattice lat(Box::cube(2, 2.0), 0.1);
    CHECK(lat.count(0) == 41);
    CHECK(lat.size() == 41u * 41u);
    for (std::size_t l : {std::size_t{0}, std::size_t{57}, lat.size() - 1}) CHECK(lat.linear(lat.multi(l)) == l);
    const Index i = lat.nearest({0.04, -0.96, 0.0});
    CHECK(lat.node(i)[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(lat.node(i)[1] == doctest::Approx(-1.0));
}

TEST_CASE("grid functions of tagged closed forms") {
    SUBCASE("constant") {
        AnalyticTerm t;
        t.tag = Tag::constant;
        t.amplitude = 1.0;
        const GridFunction u = make_grid_function(Box::cube(2, 2.0), 0.1, AnalyticFunction::single(2, t));
        for (double v : u.values()) CHECK(v == 1.0);
        CHECK(u({10.0, -7.0, 0.0}) == 1.0);
    }
    SUBCASE("bump") {
        const GridFunction u = make_grid_function(Box::cube(2, 2.0), 0.1, single(Tag::bump));
        CHECK(u.at(u.lattice().nearest({0, 0, 0})) == doctest::Approx(1.0));
        for (std::size_t l = 0; l < u.lattice().size(); ++l)
            if (norm(u.lattice().node(l), 2) >= 1.0) CHECK(u.at(l) == 0.0);
    }
    SUBCASE("gaussian") {
        const GridFunction u = make_grid_function(Box::cube(2, 4.0), 0.1, single(Tag::gaussian));
        CHECK(u.at(u.lattice().nearest({1, 0, 0})) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    }
    SUBCASE("multilinear interpolation reproduces affine data") {
        AnalyticTerm t;
        t.tag = Tag::linear_cap;
        t.amplitude = 0.5;
        t.slope = 2.0;
        t.axis = 1;
        const GridFunction u = make_grid_function(Box::cube(2, 1.0), 0.1, AnalyticFunction::single(2, t));
        CHECK(u({0.123, 0.456, 0.0}) == doctest::Approx(0.5 + 2.0 * 0.456).epsilon(1e-12));
        CHECK(u({3.0, 2.5, 0.0}) == doctest::Approx(5.5));
    }
}

TEST_CASE("grid function csv has a header row and one row per node") {
    const GridFunction u = make_grid_function(Box::cube(2, 0.5), 0.25, single(Tag::gaussian));
    std::ostringstream os;
    u.write_csv(os);
    const std::string text = os.str();
    CHECK(text.rfind("i0,i1,x,y,u\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(u.lattice().size() + 1));
}

TEST_CASE("L_s membership") {
    AnalyticTerm c;
    c.tag = Tag::constant;
    c.amplitude = 3.0;
    const LsMembership m = check_Ls_membership(make_grid_function(Box::cube(2, 2.0), 0.1, AnalyticFunction::single(2, c)), 0.5);
    CHECK(m.member);
    CHECK(std::isfinite(m.tail_bound));
    CHECK(check_Ls_membership(make_grid_function(Box::cube(2, 2.0), 0.1, single(Tag::gaussian)), 0.3).member);
    // Linear growth is integrable against |x|^{-n-2s} only when 2s > 1.
    AnalyticTerm slope;
    slope.tag = Tag::linear_cap;
    slope.slope = 1.0;
    const GridFunction lin = make_grid_function(Box::cube(2, 2.0), 0.1, AnalyticFunction::single(2, slope));
    CHECK(check_Ls_membership(lin, 0.6).member);
    CHECK_FALSE(check_Ls_membership(lin, 0.4).member);
}

TEST_CASE("normalisation constants") {
    using std::numbers::pi;
    CHECK(sphere_area(2) == doctest::Approx(2.0 * pi));
    CHECK(sphere_area(3) == doctest::Approx(4.0 * pi));
    CHECK(fractional_laplacian_constant(2, 0.5) == doctest::Approx(1.0 / (2.0 * pi)));
    CHECK(fractional_laplacian_constant(3, 0.5) == doctest::Approx(1.0 / (pi * pi)));
    CHECK(half_space_kernel_mass(2, 0.5) == doctest::Approx(2.0));
    for (double s : {0.3, 0.5, 0.8})
        CHECK(half_space_kernel_mass(2, s) ==
              doctest::Approx(oracle::half_plane_kernel_direct(Mat::Identity(2, 2), 1.0, s)).epsilon(1e-6));
}

TEST_CASE("operator config validation") {
    OperatorConfig c;
    c.s = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.s = 0.5;
    c.theta = 2.0;
    c.Theta = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.theta = 0.5;
    c.n = 4;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("hypothesis reports") {
    const HypothesisReport dg = hypothesis_report(Nonlinearity::de_giorgi(), 1.5);
    CHECK(dg.h1.holds);
    CHECK(dg.h2.holds);
    CHECK(dg.h3.holds);

    const HypothesisReport p2 = hypothesis_report(Nonlinearity::power(2.0), 1.5);
    CHECK_FALSE(p2.h1.applicable);
    CHECK_FALSE(p2.h2.holds);
    REQUIRE(p2.h2.witness);
    CHECK(*p2.h2.witness < 0.5);

    // f = 1 dominates c0 t on [0, delta0] for delta0 <= 1 / c0.
    const HypothesisReport e0 = hypothesis_report(Nonlinearity::exponential(0.0), 1.5);
    CHECK(e0.h2.holds);
}

TEST_CASE("nonlinearity values and Lipschitz bounds") {
    const Nonlinearity dg = Nonlinearity::de_giorgi();
    CHECK(dg(0.5) == doctest::Approx(0.375));
    CHECK(dg.lipschitz(0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(Nonlinearity::exponential(-1.0)(1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(Nonlinearity::exponential(-1.0).nonincreasing(0.0, 5.0));
    CHECK_THROWS_AS(Nonlinearity::schrodinger_power(1.0), InvalidArgument);
    Vec g(2);
    g << 3.0, 4.0;
    const Nonlinearity gw = Nonlinearity::gradient_weighted(Nonlinearity::constant(2.0), 2.0);
    CHECK(gw(0.0, g) == doctest::Approx(2.0 * 26.0));
}

TEST_CASE("exterior rules") {
    const ExteriorRule lay = ExteriorRule::layered({0.0, 6.0, -1.0, 0.0, 1.0});
    CHECK(lay({0.0, -0.5, 0.0}, 2) == -1.0);
    CHECK(lay({5.0, 7.0, 0.0}, 2) == 1.0);
    CHECK(lay.is_layered());
    CHECK(ExteriorRule::constant(0.3).as_layered().between == 0.3);
    CHECK_THROWS_AS(ExteriorRule::analytic(single(Tag::gaussian)).as_layered(), InvalidArgument);
    const ExteriorRule sum = ExteriorRule::constant(0.5) + ExteriorRule::analytic(single(Tag::gaussian));
    CHECK(sum({0.0, 0.0, 0.0}, 2) == doctest::Approx(1.5));
    AnalyticTerm t;
    t.tag = Tag::linear_cap;
    t.slope = 1.0;
    const ExteriorRule refl = ExteriorRule::reflect_plane(0, 1.0, ExteriorRule::analytic(AnalyticFunction::single(2, t)));
    CHECK(refl({3.0, 0.0, 0.0}, 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("geometry and problem boxes") {
    const Geometry ball = Geometry::ball(2, 1.0);
    CHECK(ball.contains({0.5, 0.5, 0.0}));
    CHECK_FALSE(ball.contains({0.8, 0.8, 0.0}));
    const Geometry strip = Geometry::strip(2, 6.0, 3.0);
    CHECK(strip.contains({2.9, 5.9, 0.0}));
    CHECK_FALSE(strip.contains({0.0, 0.0, 0.0}));
    CHECK(strip.height_above_floor({0.0, 2.5, 0.0}) == 2.5);

    ProblemSpec p;
    p.geometry = ball;
    p.h = 0.05;
    const Box b = p.sampling_box();
    for (int d = 0; d < 2; ++d) {
        CHECK(b.lo[d] <= -1.0 - 2 * p.h + 1e-12);
        const double k = b.edge(d) / p.h;
        CHECK(std::abs(k - std::round(k)) < 1e-9);
    }
    CHECK_NOTHROW(p.validate());
    p.h = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}
