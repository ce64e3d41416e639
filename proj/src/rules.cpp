#include "nlbellman/rules.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlbellman/error.hpp"

namespace nlb {

GaussRule gauss_legendre(int order, double a, double b) {
    if (order < 1) throw InvalidArgument("Gauss-Legendre order must be positive");
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= order; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
            }
            dp = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= order; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
            }
            dp = order * (x * p0 - p1) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[order - 1 - i] = mid + half * x;
        rule.weights[i] = rule.weights[order - 1 - i] = half * w;
    }
    return rule;
}

SphereRule sphere_rule(int dim, int resolution) {
    if (resolution < 1) throw InvalidArgument("sphere rule resolution must be positive");
    SphereRule rule;
    const double pi = std::numbers::pi;
    if (dim == 2) {
        const int m = 2 * resolution;
        for (int j = 0; j < m; ++j) {
            const double a = (j + 0.5) * pi / resolution;
            rule.directions.push_back({std::cos(a), std::sin(a), 0.0});
            rule.weights.push_back(2.0 * pi / m);
        }
    } else if (dim == 3) {
        const GaussRule polar = gauss_legendre(resolution, -1.0, 1.0);
        const int m = 2 * resolution;
        for (int i = 0; i < resolution; ++i) {
            const double c = polar.nodes[i];
            const double r = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int k = 0; k < m; ++k) {
                const double a = (k + 0.5) * pi / resolution;
                rule.directions.push_back({r * std::cos(a), r * std::sin(a), c});
                rule.weights.push_back(polar.weights[i] * 2.0 * pi / m);
            }
        }
    } else {
        throw InvalidArgument("sphere rules exist for dimension 2 and 3");
    }
    return rule;
}

}  // namespace nlb
