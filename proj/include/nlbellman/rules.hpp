#pragma once

#include <vector>

#include "nlbellman/lattice.hpp"

namespace nlb {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule with `order` nodes on [a, b].
GaussRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

/// Quadrature on the unit sphere S^{dim-1}, closed under x -> -x.
/// dim = 2: 2*resolution equispaced directions (offset by half a step).
/// dim = 3: resolution Gauss nodes in cos(polar) times 2*resolution azimuths.
struct SphereRule {
    std::vector<Point> directions;
    std::vector<double> weights;
};

SphereRule sphere_rule(int dim, int resolution);

}  // namespace nlb
