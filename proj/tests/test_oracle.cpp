#include <doctest.h>

#include <cmath>

#include "nlbellman/error.hpp"
#include "oracle.hpp"

using namespace nlb;

namespace {

AnalyticFunction tagged(Tag tag, int dim = 2) {
    AnalyticTerm t;
    t.tag = tag;
    return AnalyticFunction::single(dim, t);
}

}  // namespace

TEST_CASE("Fourier and direct oracles agree on Gaussians") {
    for (int n : {2, 3}) {
        const AnalyticFunction g = tagged(Tag::gaussian, n);
        for (double s : {0.3, 0.5, 0.8}) {
            for (double r : {0.0, 0.5}) {
                const Point x{r, 0, 0};
                const double f = oracle::frac_laplacian_fourier(g, x, s);
                CHECK(std::abs(oracle::frac_laplacian_direct(g, x, s) - f) <= 5e-3 * std::abs(f));
                CHECK(f == doctest::Approx(oracle::gaussian_frac_laplacian_closed_form(n, s, r)).epsilon(1e-8));
            }
        }
    }
    CHECK(oracle::gaussian_frac_laplacian_closed_form(2, 0.5, 0.0) == doctest::Approx(std::sqrt(std::acos(-1.0))));
}

TEST_CASE("constants are annihilated") {
    AnalyticTerm c;
    c.tag = Tag::constant;
    c.amplitude = 4.0;
    const AnalyticFunction u = AnalyticFunction::single(2, c);
    for (oracle::Operator op : {oracle::Operator::frac_laplacian_fourier, oracle::Operator::frac_laplacian_direct,
                                oracle::Operator::L_A_direct})
        CHECK(oracle::oracle_eval(u, op, {0.3, 0.1, 0}, 0.5, Mat::Identity(2, 2)) == 0.0);
    CHECK_THROWS_AS(oracle::frac_laplacian_fourier(tagged(Tag::bump), {0, 0, 0}, 0.5), InvalidArgument);
    CHECK(oracle::parse_operator("L_A_direct") == oracle::Operator::L_A_direct);
}

TEST_CASE("bump decays like |x|^{-n-2s} away from its support") {
    const AnalyticFunction psi = tagged(Tag::bump);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (double r = 3.0; r <= 10.0 + 1e-9; r *= std::pow(10.0 / 3.0, 0.2)) {
        const double v = oracle::L_A_direct(psi, Mat::Identity(2, 2), {r, 0, 0}, 0.5);
        CHECK(v > 0.0);
        sx += std::log(r);
        sy += std::log(v);
        sxx += std::log(r) * std::log(r);
        sxy += std::log(r) * std::log(v);
        ++m;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(std::abs(slope + 3.0) <= 0.15);
}

TEST_CASE("direct oracle refuses divergent tails") {
    CHECK_THROWS_AS(oracle::L_A_direct(tagged(Tag::sqrt_quadratic), Mat::Identity(2, 2), {0, 0, 0}, 0.5),
                    EvaluationError);
}
