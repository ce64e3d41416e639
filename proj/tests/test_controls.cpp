#include <doctest.h>

#include <cmath>

#include "nlbellman/controls.hpp"
#include "nlbellman/error.hpp"

using namespace nlb;

namespace {

ControlSetSpec spec(ControlKind kind, int n, double theta, double Theta, int eig = 3, int ang = 4) {
    ControlSetSpec s;
    s.kind = kind;
    s.n = n;
    s.theta = theta;
    s.Theta = Theta;
    s.eig_resolution = eig;
    s.angle_resolution = ang;
    return s;
}

}  // namespace

TEST_CASE("degenerate sets collapse to the identity") {
    for (int n : {2, 3}) {
        const ControlSet b = build_control_set(spec(ControlKind::bellman_box, n, 1.0, 1.0));
        REQUIRE(b.size() == 1);
        CHECK(b.members[0].approx_equal(ControlMatrix::identity(n)));
        const ControlSet m = build_control_set(spec(ControlKind::monge_ampere, n, 1.0, 1.0));
        REQUIRE(m.size() == 1);
        CHECK(m.members[0].approx_equal(ControlMatrix::identity(n)));
    }
}

TEST_CASE("bellman sets are admissible and reflection closed") {
    for (int n : {2, 3}) {
        const ControlSet b = build_control_set(spec(ControlKind::bellman_box, n, 0.5, 2.0));
        CHECK(b.admissible());
        CHECK(b.reflection_closed());
        CHECK(b.members[0].approx_equal(ControlMatrix::identity(n)));
        for (const ControlMatrix& A : b.members) {
            CHECK(A.lambda_min() >= 0.5 - 1e-10);
            CHECK(A.lambda_max() <= 2.0 + 1e-10);
            CHECK((A.entries() - A.entries().transpose()).norm() == 0.0);
        }
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = i + 1; j < b.size(); ++j) CHECK_FALSE(b.members[i].approx_equal(b.members[j], 1e-9));
    }
}

TEST_CASE("Monge-Ampere sets respect det = 1 and the eigenvalue cap") {
    const ControlSet m = build_control_set(spec(ControlKind::monge_ampere, 2, 0.25, 4.0, 5, 8));
    CHECK(m.admissible());
    for (const ControlMatrix& A : m.members) {
        CHECK(A.det() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(A.lambda_max() <= 4.0 + 1e-10);
        CHECK(A.lambda_min() >= 0.25 - 1e-10);
    }
    const ControlSet m3 = build_control_set(spec(ControlKind::monge_ampere, 3, 0.5, 4.0, 4, 4));
    CHECK(m3.admissible());
    for (const ControlMatrix& A : m3.members) CHECK(A.lambda_max() <= std::pow(0.5, -2.0) + 1e-10);
}

TEST_CASE("refinement") {
    const ControlSet single = build_control_set(spec(ControlKind::singleton_identity, 2, 0.5, 2.0));
    const ControlSet rs = refine(single);
    REQUIRE(rs.size() == 1);
    CHECK(rs.members[0].approx_equal(single.members[0]));

    for (ControlKind kind : {ControlKind::bellman_box, ControlKind::monge_ampere}) {
        const ControlSet a = build_control_set(spec(kind, 2, 0.5, 2.0));
        const ControlSet b = refine(a);
        const ControlSet c = refine(b);
        CHECK(b.size() > a.size());
        CHECK(is_subsequence(a, b));
        CHECK(is_subsequence(b, c));
        CHECK(c.admissible());
        CHECK(b.spec.eig_resolution == 2 * a.spec.eig_resolution - 1);
        CHECK(b.spec.angle_resolution == 2 * a.spec.angle_resolution);
    }
}

TEST_CASE("invalid specifications are rejected") {
    CHECK_THROWS_AS(build_control_set(spec(ControlKind::bellman_box, 2, 2.0, 1.0)), InvalidArgument);
    CHECK_THROWS_AS(build_control_set(spec(ControlKind::bellman_box, 2, 0.5, 2.0, 1)), InvalidArgument);
    CHECK_THROWS_AS(build_control_set(spec(ControlKind::bellman_box, 4, 0.5, 2.0)), InvalidArgument);
    CHECK_THROWS_AS(build_control_set(spec(ControlKind::monge_ampere, 2, 1.5, 2.0)), InvalidArgument);
    Mat bad(2, 2);
    bad << 1.0, 0.5, 0.4, 1.0;
    CHECK_THROWS_AS(ControlMatrix{bad}, InvalidArgument);
    bad << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(ControlMatrix{bad}, InvalidArgument);
    CHECK(parse_control_kind("bellman_box") == ControlKind::bellman_box);
    CHECK_THROWS_AS(parse_control_kind("nope"), InvalidArgument);
}
