#include <doctest.h>

#include <sstream>

#include "nlbellman/error.hpp"
#include "nlbellman/io.hpp"

using namespace nlb;

namespace {

std::string error_of(const Json& j) {
    try {
        problem_from_json(j);
    } catch (const InvalidArgument& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("problem specs round-trip through JSON") {
    ProblemSpec p;
    p.geometry = Geometry::strip(2, 6.0, 3.0);
    p.config.s = 0.7;
    p.config.theta = 0.5;
    p.config.Theta = 2.0;
    p.controls.kind = ControlKind::bellman_box;
    p.controls.theta = 0.5;
    p.controls.Theta = 2.0;
    p.f = Nonlinearity::exponential(-1.0);
    p.exterior = ExteriorRule::layered({0.0, 6.0, 0.0, 0.0, 1.0});
    p.h = 0.125;
    const Json j = to_json(p);
    const ProblemSpec q = problem_from_json(j);
    CHECK(to_json(q).dump() == j.dump());
    CHECK(q.exterior.as_layered().above == 1.0);
    CHECK(q.f.kappa == -1.0);
}

TEST_CASE("analytic exteriors and nonlinearities round-trip") {
    AnalyticTerm t;
    t.tag = Tag::gaussian;
    t.center = {0.5, -0.5, 0};
    t.width = 0.7;
    const ExteriorRule rule = ExteriorRule::reflect_plane(1, 0.25, ExteriorRule::analytic(AnalyticFunction::single(2, t)));
    const Json j = to_json(rule);
    CHECK(to_json(exterior_from_json(j, 2)).dump() == j.dump());
    const Nonlinearity gw = Nonlinearity::gradient_weighted(Nonlinearity::schrodinger_power(3.0), 1.5);
    CHECK(to_json(nonlinearity_from_json(to_json(gw))).dump() == to_json(gw).dump());
}

TEST_CASE("control sets export as matrices") {
    ControlSetSpec s;
    s.kind = ControlKind::bellman_box;
    s.theta = 0.5;
    s.Theta = 2.0;
    const ControlSet set = build_control_set(s);
    const std::vector<ControlMatrix> back = control_members_from_json(to_json(set));
    REQUIRE(back.size() == set.size());
    for (std::size_t k = 0; k < back.size(); ++k) CHECK(back[k].approx_equal(set.members[k]));
    CHECK_THROWS_AS(control_members_from_json(Json::parse("[[[1, 2], [3, 4]]]")), InvalidArgument);
}

TEST_CASE("validation errors name the offending field") {
    const Json base = Json::parse(R"({"geometry": {"kind": "ball", "radius": 1.0}, "h": 0.1})");
    CHECK_NOTHROW(problem_from_json(base));
    Json j = base;
    j["geometry"]["kind"] = "torus";
    CHECK(error_of(j).find("problem.geometry.kind") != std::string::npos);
    j = base;
    j["config"] = Json::parse(R"({"s": "half"})");
    CHECK(error_of(j).find("problem.config.s") != std::string::npos);
    j = base;
    j["controls"] = Json::parse(R"({"kind": "bellman_box", "eig_resolution": 1.5})");
    CHECK(error_of(j).find("problem.controls.eig_resolution") != std::string::npos);
    j = base;
    j["colour"] = "blue";
    CHECK(error_of(j).find("problem.colour") != std::string::npos);
    j = base;
    j["f"] = Json::parse(R"({"kind": "power"})");
    CHECK(error_of(j).find("problem.f.p") != std::string::npos);
    j = base;
    j["exterior"] = Json::parse(R"({"kind": "analytic", "function": {"tag": "wave"}})");
    CHECK(error_of(j).find("problem.exterior.function.tag") != std::string::npos);
}

TEST_CASE("CSV writer") {
    std::ostringstream os;
    CsvWriter w(os, {"tau", "min_w"});
    w.row(std::vector<double>{0.5, -1e-3});
    w.row(std::vector<std::string>{"a,b", "c"});
    CHECK(os.str() == "tau,min_w\n0.5,-0.001\n\"a,b\",c\n");
    CHECK_THROWS_AS(w.row(std::vector<double>{1.0}), InvalidArgument);
    CHECK(format_double(0.1) == "0.10000000000000001");
}
