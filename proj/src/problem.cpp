#include "nlbellman/problem.hpp"

#include <algorithm>
#include <cmath>

#include "nlbellman/error.hpp"

namespace nlb {

Geometry Geometry::ball(int dim, double radius, Point center) {
    Geometry g;
    g.kind = Kind::ball;
    g.dim = dim;
    g.radius = radius;
    g.center = center;
    return g;
}

Geometry Geometry::strip(int dim, double height, double half_width) {
    Geometry g;
    g.kind = Kind::strip;
    g.dim = dim;
    g.height = height;
    g.half_width = half_width;
    return g;
}

std::string_view Geometry::kind_name() const {
    switch (kind) {
        case Kind::ball: return "ball";
        case Kind::box: return "box";
        case Kind::strip: return "strip";
        case Kind::epigraph: return "epigraph";
        case Kind::cylinder: return "cylinder";
    }
    return "unknown";
}

namespace {

double graph_value(const std::vector<std::pair<double, double>>& graph, double x) {
    if (graph.empty()) return 0.0;
    if (x <= graph.front().first) return graph.front().second;
    if (x >= graph.back().first) return graph.back().second;
    auto hi = std::upper_bound(graph.begin(), graph.end(), x, [](double v, const auto& k) { return v < k.first; });
    auto lo = hi - 1;
    const double t = (x - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

}  // namespace

double Geometry::floor_at(const Point& x) const {
    switch (kind) {
        case Kind::ball: return center[dim - 1] - radius;
        case Kind::box: return lo[dim - 1];
        case Kind::strip:
        case Kind::cylinder: return 0.0;
        case Kind::epigraph: return graph_value(graph, x[0]);
    }
    return 0.0;
}

bool Geometry::contains(const Point& x) const {
    const double eps = 1e-12;
    const int n = dim;
    switch (kind) {
        case Kind::ball: return norm(x - center, n) < radius - eps;
        case Kind::box:
            for (int d = 0; d < n; ++d)
                if (!(x[d] > lo[d] + eps && x[d] < hi[d] - eps)) return false;
            return true;
        case Kind::strip:
        case Kind::epigraph: {
            for (int d = 0; d < n - 1; ++d)
                if (!(std::abs(x[d]) < half_width - eps)) return false;
            return x[n - 1] > floor_at(x) + eps && x[n - 1] < height - eps;
        }
        case Kind::cylinder: {
            double r2 = 0.0;
            for (int d = 0; d < n - 1; ++d) r2 += x[d] * x[d];
            return std::sqrt(r2) < radius - eps && x[n - 1] > eps && x[n - 1] < height - eps;
        }
    }
    return false;
}

Box Geometry::bounding_box() const {
    Box b;
    b.dim = dim;
    switch (kind) {
        case Kind::ball:
            for (int d = 0; d < dim; ++d) {
                b.lo[d] = center[d] - radius;
                b.hi[d] = center[d] + radius;
            }
            break;
        case Kind::box:
            b.lo = lo;
            b.hi = hi;
            break;
        case Kind::strip:
        case Kind::epigraph:
        case Kind::cylinder: {
            const double w = kind == Kind::cylinder ? radius : half_width;
            for (int d = 0; d < dim - 1; ++d) {
                b.lo[d] = -w;
                b.hi[d] = w;
            }
            double bottom = 0.0;
            if (kind == Kind::epigraph) {
                bottom = graph.empty() ? 0.0 : graph.front().second;
                for (const auto& k : graph) bottom = std::min(bottom, k.second);
            }
            b.lo[dim - 1] = bottom;
            b.hi[dim - 1] = height;
            break;
        }
    }
    return b;
}

void Geometry::validate() const {
    if (dim < 2 || dim > 3) throw InvalidArgument("geometry.dim must be 2 or 3");
    switch (kind) {
        case Kind::ball:
            if (!(radius > 0.0)) throw InvalidArgument("geometry.radius must be positive");
            break;
        case Kind::box:
            for (int d = 0; d < dim; ++d)
                if (!(hi[d] > lo[d])) throw InvalidArgument("geometry box needs lo < hi on every axis");
            break;
        case Kind::cylinder:
            if (!(radius > 0.0)) throw InvalidArgument("geometry.radius must be positive");
            [[fallthrough]];
        case Kind::strip:
        case Kind::epigraph:
            if (!(height > 0.0)) throw InvalidArgument("geometry.height must be positive");
            if (kind != Kind::cylinder && !(half_width > 0.0))
                throw InvalidArgument("geometry.half_width must be positive");
            for (std::size_t i = 1; i < graph.size(); ++i)
                if (!(graph[i].first > graph[i - 1].first))
                    throw InvalidArgument("epigraph knots must be strictly increasing in x_1");
            for (const auto& k : graph)
                if (!(k.second < height)) throw InvalidArgument("epigraph lies above the slab height");
            break;
    }
}

Box ProblemSpec::sampling_box() const {
    Box b = geometry.bounding_box();
    for (int d = 0; d < b.dim; ++d) {
        b.lo[d] = std::floor((b.lo[d] - margin * h) / h + 1e-9) * h;
        b.hi[d] = std::ceil((b.hi[d] + margin * h) / h - 1e-9) * h;
    }
    return b;
}

QuadratureScheme ProblemSpec::resolved_scheme() const {
    return QuadratureScheme::resolve(config, h, sampling_box().diameter(), scheme);
}

void ProblemSpec::validate() const {
    geometry.validate();
    config.validate();
    controls.validate();
    if (geometry.dim != config.n || controls.n != config.n)
        throw InvalidArgument("geometry, config and controls must share the dimension");
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("h must be positive");
    if (margin < 2) throw InvalidArgument("sampling margin must be at least 2 grid spacings");
    resolved_scheme();
}

}  // namespace nlb
