#include "nlbellman/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "nlbellman/error.hpp"

namespace nlb {

namespace {

using Reader = JsonReader;

// Rethrows enum parse failures with the field name attached.
template <class F>
auto parse_named(const std::string& where, F&& parse) {
    try {
        return parse();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(where + ": " + e.what());
    }
}

Point point_at(const Json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw InvalidArgument(where + ": expected an array of " + std::to_string(dim) + " numbers");
    Point p{};
    for (int d = 0; d < dim; ++d) p[d] = Reader::as_num(j[d], where + "[" + std::to_string(d) + "]");
    return p;
}

Json point_json(const Point& p, int dim) {
    Json a = Json::array();
    for (int d = 0; d < dim; ++d) a.push_back(p[d]);
    return a;
}

Json matrix_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

Mat matrix_at(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw InvalidArgument(where + ": expected a square array of rows");
    const std::size_t n = j.size();
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!j[i].is_array() || j[i].size() != n) throw InvalidArgument(where + ": expected a square array of rows");
        for (std::size_t k = 0; k < n; ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                Reader::as_num(j[i][k], where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    return m;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json hypothesis_json(const HypothesisCheck& c) {
    Json j;
    j["applicable"] = c.applicable;
    j["holds"] = c.holds;
    j["witness"] = c.witness ? Json(*c.witness) : Json(nullptr);
    return j;
}

OperatorConfig config_from(const Json& j, const std::string& where, int default_n) {
    Reader r(j, where);
    OperatorConfig c;
    c.n = r.integer("n", default_n);
    c.s = r.num("s", c.s);
    c.theta = r.num("theta", c.theta);
    c.Theta = r.num("Theta", c.Theta);
    c.c_ns = r.num("c_ns", c.c_ns);
    c.near_radius = r.num("near_radius", c.near_radius);
    c.far_radius = r.num("far_radius", c.far_radius);
    r.finish();
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument((where.empty() ? std::string("config") : where) + ": " + e.what());
    }
    return c;
}

QuadratureScheme scheme_from(const Json& j, const std::string& where) {
    Reader r(j, where);
    QuadratureScheme q;
    q.near_radius = r.num("near_radius", q.near_radius);
    q.far_radius = r.num("far_radius", q.far_radius);
    q.radial_panels_per_log = r.num("radial_panels_per_log", q.radial_panels_per_log);
    q.radial_order = r.integer("radial_order", q.radial_order);
    q.angular = r.integer("angular", q.angular);
    q.tail_order = r.integer("tail_order", q.tail_order);
    r.finish();
    return q;
}

ControlSetSpec controls_from(const Json& j, const std::string& where, const OperatorConfig* config) {
    Reader r(j, where);
    ControlSetSpec s;
    s.kind = parse_named(r.field("kind"), [&] { return parse_control_kind(r.str("kind")); });
    s.n = r.integer("n", config ? config->n : s.n);
    s.theta = r.num("theta", config ? config->theta : s.theta);
    s.Theta = r.num("Theta", config ? config->Theta : s.Theta);
    s.eig_resolution = r.integer("eig_resolution", s.eig_resolution);
    s.angle_resolution = r.integer("angle_resolution", s.angle_resolution);
    r.finish();
    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(where + ": " + e.what());
    }
    return s;
}

AnalyticTerm term_from(const Json& j, int dim, const std::string& where) {
    Reader r(j, where);
    AnalyticTerm t;
    t.tag = parse_named(r.field("tag"), [&] { return parse_tag(r.str("tag")); });
    t.amplitude = r.num("amplitude", t.amplitude);
    if (r.has("center")) t.center = point_at(r.at("center"), dim, r.field("center"));
    t.width = r.num("width", t.width);
    t.slope = r.num("slope", t.slope);
    t.axis = r.integer("axis", t.axis);
    r.finish();
    if (!(t.width > 0.0)) throw InvalidArgument(r.field("width") + ": must be positive");
    if (t.axis < 0 || t.axis >= dim) throw InvalidArgument(r.field("axis") + ": out of range");
    return t;
}

AnalyticFunction analytic_from(const Json& j, int dim, const std::string& where) {
    std::vector<AnalyticTerm> terms;
    const Json* list = &j;
    if (j.is_object() && j.contains("terms")) {
        Reader r(j, where);
        if (r.has("dim") && r.integer("dim", dim) != dim) throw InvalidArgument(r.field("dim") + ": dimension mismatch");
        list = &r.at("terms");
        r.finish();
        if (!list->is_array()) throw InvalidArgument(where + ".terms: expected an array");
    }
    if (list->is_array()) {
        for (std::size_t k = 0; k < list->size(); ++k)
            terms.push_back(term_from((*list)[k], dim, where + ".terms[" + std::to_string(k) + "]"));
    } else {
        terms.push_back(term_from(*list, dim, where));
    }
    return AnalyticFunction(dim, terms);
}

ExteriorRule exterior_from(const Json& j, int dim, const std::string& where) {
    Reader r(j, where);
    const std::string kind = r.str("kind");
    ExteriorRule rule;
    if (kind == "zero") {
        rule = ExteriorRule::zero();
    } else if (kind == "constant") {
        rule = ExteriorRule::constant(r.num("value"));
    } else if (kind == "analytic") {
        rule = ExteriorRule::analytic(analytic_from(r.at("function"), dim, r.field("function")));
    } else if (kind == "layered") {
        LayeredData lay;
        lay.lower = r.num("lower", lay.lower);
        lay.upper = r.num("upper", lay.upper);
        lay.below = r.num("below", lay.below);
        lay.between = r.num("between", lay.between);
        lay.above = r.num("above", lay.above);
        if (lay.upper < lay.lower) throw InvalidArgument(r.field("upper") + ": must not be below lower");
        rule = ExteriorRule::layered(lay);
    } else if (kind == "reflect_plane") {
        const int axis = r.integer("axis", 0);
        if (axis < 0 || axis >= dim) throw InvalidArgument(r.field("axis") + ": out of range");
        rule = ExteriorRule::reflect_plane(axis, r.num("position", 0.0),
                                           exterior_from(r.at("base"), dim, r.field("base")));
    } else {
        throw InvalidArgument(r.field("kind") + ": unknown exterior kind '" + kind + "'");
    }
    r.finish();
    return rule;
}

Nonlinearity nonlinearity_from(const Json& j, const std::string& where) {
    Reader r(j, where);
    const std::string kind = r.str("kind");
    Nonlinearity f;
    try {
        if (kind == "power") {
            f = Nonlinearity::power(r.num("p"));
        } else if (kind == "exponential") {
            f = Nonlinearity::exponential(r.num("kappa"));
        } else if (kind == "de_giorgi") {
            f = Nonlinearity::de_giorgi();
        } else if (kind == "schrodinger_power") {
            f = Nonlinearity::schrodinger_power(r.num("p"));
        } else if (kind == "constant") {
            f = Nonlinearity::constant(r.num("c"));
        } else if (kind == "gradient_weighted") {
            f = Nonlinearity::gradient_weighted(nonlinearity_from(r.at("base"), r.field("base")), r.num("sigma"));
        } else {
            throw InvalidArgument("unknown nonlinearity kind '" + kind + "'");
        }
    } catch (const InvalidArgument& e) {
        const std::string msg = e.what();
        if (msg.rfind(where, 0) == 0) throw;
        throw InvalidArgument(where + ": " + msg);
    }
    if (r.has("mu")) f.mu = r.num("mu");
    f.delta0 = r.num("delta0", f.delta0);
    f.delta1 = r.num("delta1", f.delta1);
    f.c0 = r.num("c0", f.c0);
    r.finish();
    return f;
}

Geometry geometry_from(const Json& j, const std::string& where) {
    Reader r(j, where);
    const std::string kind = r.str("kind");
    Geometry g;
    g.dim = r.integer("dim", 2);
    if (g.dim != 2 && g.dim != 3) throw InvalidArgument(r.field("dim") + ": must be 2 or 3");
    if (kind == "ball") {
        g.kind = Geometry::Kind::ball;
    } else if (kind == "box") {
        g.kind = Geometry::Kind::box;
    } else if (kind == "strip") {
        g.kind = Geometry::Kind::strip;
    } else if (kind == "epigraph") {
        g.kind = Geometry::Kind::epigraph;
    } else if (kind == "cylinder") {
        g.kind = Geometry::Kind::cylinder;
    } else {
        throw InvalidArgument(r.field("kind") + ": unknown geometry kind '" + kind + "'");
    }
    if (r.has("center")) g.center = point_at(r.at("center"), g.dim, r.field("center"));
    g.radius = r.num("radius", g.radius);
    if (r.has("lo")) g.lo = point_at(r.at("lo"), g.dim, r.field("lo"));
    if (r.has("hi")) g.hi = point_at(r.at("hi"), g.dim, r.field("hi"));
    g.height = r.num("height", g.height);
    g.half_width = r.num("half_width", g.half_width);
    if (r.has("graph")) {
        const Json& knots = r.at("graph");
        if (!knots.is_array()) throw InvalidArgument(r.field("graph") + ": expected an array of [x1, phi] pairs");
        for (std::size_t k = 0; k < knots.size(); ++k) {
            const std::string w = r.field("graph") + "[" + std::to_string(k) + "]";
            if (!knots[k].is_array() || knots[k].size() != 2) throw InvalidArgument(w + ": expected [x1, phi]");
            g.graph.emplace_back(Reader::as_num(knots[k][0], w), Reader::as_num(knots[k][1], w));
        }
    }
    r.finish();
    try {
        g.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(where + ": " + e.what());
    }
    return g;
}

}  // namespace

Json to_json(const OperatorConfig& c) {
    Json j;
    j["n"] = c.n;
    j["s"] = c.s;
    j["theta"] = c.theta;
    j["Theta"] = c.Theta;
    j["c_ns"] = c.normalization();
    j["near_radius"] = c.near_radius;
    j["far_radius"] = c.far_radius;
    return j;
}

OperatorConfig operator_config_from_json(const Json& j) { return config_from(j, "config", 2); }

Json to_json(const QuadratureScheme& q) {
    Json j;
    j["near_radius"] = q.near_radius;
    j["far_radius"] = q.far_radius;
    j["radial_panels_per_log"] = q.radial_panels_per_log;
    j["radial_order"] = q.radial_order;
    j["angular"] = q.angular;
    j["tail_order"] = q.tail_order;
    return j;
}

QuadratureScheme scheme_from_json(const Json& j) { return scheme_from(j, "scheme"); }

Json to_json(const ControlSetSpec& s) {
    Json j;
    j["kind"] = std::string(control_kind_name(s.kind));
    j["n"] = s.n;
    j["theta"] = s.theta;
    j["Theta"] = s.Theta;
    j["eig_resolution"] = s.eig_resolution;
    j["angle_resolution"] = s.angle_resolution;
    return j;
}

ControlSetSpec control_spec_from_json(const Json& j) { return controls_from(j, "controls", nullptr); }

Json to_json(const ControlSet& set) {
    Json a = Json::array();
    for (const ControlMatrix& A : set.members) a.push_back(matrix_json(A.entries()));
    return a;
}

std::vector<ControlMatrix> control_members_from_json(const Json& j) {
    if (!j.is_array()) throw InvalidArgument("controls: expected an array of matrices");
    std::vector<ControlMatrix> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string where = "controls[" + std::to_string(k) + "]";
        try {
            out.emplace_back(matrix_at(j[k], where));
        } catch (const InvalidArgument& e) {
            const std::string msg = e.what();
            if (msg.rfind(where, 0) == 0) throw;
            throw InvalidArgument(where + ": " + msg);
        }
    }
    return out;
}

Json to_json(const AnalyticFunction& f) {
    Json j;
    j["dim"] = f.dim();
    Json terms = Json::array();
    for (const AnalyticTerm& t : f.terms()) {
        Json tj;
        tj["tag"] = std::string(tag_name(t.tag));
        tj["amplitude"] = t.amplitude;
        tj["center"] = point_json(t.center, f.dim());
        tj["width"] = t.width;
        tj["slope"] = t.slope;
        tj["axis"] = t.axis;
        terms.push_back(tj);
    }
    j["terms"] = terms;
    return j;
}

AnalyticFunction analytic_from_json(const Json& j, int dim) { return analytic_from(j, dim, "function"); }

Json to_json(const ExteriorRule& rule) {
    Json j;
    j["kind"] = std::string(rule.kind_name());
    switch (rule.kind()) {
        case ExteriorRule::Kind::zero: break;
        case ExteriorRule::Kind::constant: j["value"] = rule.constant_value(); break;
        case ExteriorRule::Kind::analytic: j["function"] = to_json(*rule.analytic_function()); break;
        case ExteriorRule::Kind::layered: {
            const LayeredData lay = rule.as_layered();
            j["lower"] = lay.lower;
            j["upper"] = lay.upper;
            j["below"] = lay.below;
            j["between"] = lay.between;
            j["above"] = lay.above;
            break;
        }
        case ExteriorRule::Kind::reflect_plane: {
            const ReflectedData* r = rule.reflected();
            j["axis"] = r->axis;
            j["position"] = r->position;
            j["base"] = to_json(*r->base);
            break;
        }
    }
    return j;
}

ExteriorRule exterior_from_json(const Json& j, int dim) { return exterior_from(j, dim, "exterior"); }

Json to_json(const Nonlinearity& f) {
    Json j;
    j["kind"] = std::string(f.name());
    switch (f.kind) {
        case Nonlinearity::Kind::power:
        case Nonlinearity::Kind::schrodinger_power: j["p"] = f.p; break;
        case Nonlinearity::Kind::exponential: j["kappa"] = f.kappa; break;
        case Nonlinearity::Kind::constant: j["c"] = f.c; break;
        case Nonlinearity::Kind::gradient_weighted:
            j["sigma"] = f.sigma;
            j["base"] = to_json(*f.base);
            break;
        case Nonlinearity::Kind::de_giorgi: break;
    }
    j["mu"] = f.mu ? Json(*f.mu) : Json(nullptr);
    j["delta0"] = f.delta0;
    j["delta1"] = f.delta1;
    j["c0"] = f.c0;
    return j;
}

Nonlinearity nonlinearity_from_json(const Json& j) { return nonlinearity_from(j, "f"); }

Json to_json(const Geometry& g) {
    Json j;
    j["kind"] = std::string(g.kind_name());
    j["dim"] = g.dim;
    switch (g.kind) {
        case Geometry::Kind::ball:
            j["center"] = point_json(g.center, g.dim);
            j["radius"] = g.radius;
            break;
        case Geometry::Kind::box:
            j["lo"] = point_json(g.lo, g.dim);
            j["hi"] = point_json(g.hi, g.dim);
            break;
        case Geometry::Kind::strip:
            j["height"] = g.height;
            j["half_width"] = g.half_width;
            break;
        case Geometry::Kind::epigraph: {
            j["height"] = g.height;
            j["half_width"] = g.half_width;
            Json knots = Json::array();
            for (const auto& [x, phi] : g.graph) knots.push_back(Json::array({x, phi}));
            j["graph"] = knots;
            break;
        }
        case Geometry::Kind::cylinder:
            j["radius"] = g.radius;
            j["height"] = g.height;
            break;
    }
    return j;
}

Geometry geometry_from_json(const Json& j) { return geometry_from(j, "geometry"); }

Json to_json(const ProblemSpec& p) {
    Json j;
    j["geometry"] = to_json(p.geometry);
    j["config"] = to_json(p.config);
    j["controls"] = to_json(p.controls);
    j["f"] = to_json(p.f);
    j["exterior"] = to_json(p.exterior);
    j["h"] = p.h;
    j["margin"] = p.margin;
    j["scheme"] = to_json(p.resolved_scheme());
    j["near_stencil"] = p.near_stencil == NearStencil::selling ? "selling" : "central";
    j["check_monotone"] = p.check_monotone;
    return j;
}

ProblemSpec problem_from_json(const Json& j) {
    Reader r(j, "problem");
    ProblemSpec p;
    p.geometry = geometry_from(r.at("geometry"), r.field("geometry"));
    const int n = p.geometry.dim;
    p.config = r.has("config") ? config_from(r.at("config"), r.field("config"), n) : OperatorConfig{};
    if (p.config.n != n) throw InvalidArgument(r.field("config.n") + ": does not match the geometry dimension");
    if (r.has("controls")) {
        p.controls = controls_from(r.at("controls"), r.field("controls"), &p.config);
    } else {
        p.controls.n = n;
        p.controls.theta = p.config.theta;
        p.controls.Theta = p.config.Theta;
    }
    if (p.controls.n != n) throw InvalidArgument(r.field("controls.n") + ": does not match the geometry dimension");
    if (r.has("f")) p.f = nonlinearity_from(r.at("f"), r.field("f"));
    if (r.has("exterior")) p.exterior = exterior_from(r.at("exterior"), n, r.field("exterior"));
    p.h = r.num("h", p.h);
    p.margin = r.integer("margin", p.margin);
    if (r.has("scheme")) p.scheme = scheme_from(r.at("scheme"), r.field("scheme"));
    const std::string stencil = r.str("near_stencil", "selling");
    if (stencil == "selling") {
        p.near_stencil = NearStencil::selling;
    } else if (stencil == "central") {
        p.near_stencil = NearStencil::central;
    } else {
        throw InvalidArgument(r.field("near_stencil") + ": expected 'selling' or 'central'");
    }
    p.check_monotone = r.flag("check_monotone", p.check_monotone);
    r.finish();
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(std::string("problem: ") + e.what());
    }
    return p;
}

Json to_json(const Point& p, int dim) { return point_json(p, dim); }

Point point_from_json(const Json& j, int dim) { return point_at(j, dim, "point"); }

Json to_json(const Evaluation& e) {
    Json j;
    j["value"] = e.value;
    j["near"] = e.near;
    j["mid"] = e.mid;
    j["far"] = e.far;
    j["error_bar"] = e.error_bar;
    return j;
}

Json to_json(const SolveReport& r) {
    Json j;
    j["converged"] = r.converged;
    j["outer_iterations"] = r.outer_iterations;
    j["policy_iterations"] = r.policy_iterations;
    j["residual_history"] = r.residual_history;
    j["final_residual"] = r.residual_history.empty() ? Json(nullptr) : Json(r.residual_history.back());
    j["lipschitz_shift"] = r.lipschitz_shift;
    j["unknowns"] = r.unknowns;
    j["seconds"] = r.seconds;
    j["policy_map"] = r.policy_map;
    return j;
}

Json to_json(const PlaneSweepReport& r, int dim) {
    Json j;
    j["direction"] = point_json(r.direction, dim);
    j["center"] = r.center;
    j["tol"] = r.tol;
    j["reflection_deviation"] = r.reflection_deviation;
    j["antisymmetry_defect"] = r.antisymmetry_defect;
    j["monotone"] = r.monotone;
    j["symmetric"] = r.symmetric;
    Json recs = Json::array();
    for (const PlaneRecord& rec : r.records) {
        Json x;
        x["lambda"] = rec.lambda;
        x["nodes"] = rec.nodes;
        x["min_w"] = number_or_null(rec.min_w);
        x["argmin"] = point_json(rec.argmin, dim);
        x["c"] = rec.c;
        recs.push_back(x);
    }
    j["records"] = recs;
    return j;
}

Json to_json(const SlideReport& r, int dim) {
    Json j;
    j["tol"] = r.tol;
    j["probe_top"] = r.probe_top;
    j["monotone"] = r.monotone;
    Json recs = Json::array();
    for (const SlideRecord& rec : r.records) {
        Json x;
        x["tau"] = rec.tau;
        x["nodes"] = rec.nodes;
        x["min_w"] = number_or_null(rec.min_w);
        x["argmin"] = point_json(rec.argmin, dim);
        recs.push_back(x);
    }
    j["records"] = recs;
    return j;
}

Json to_json(const SlideTruncation& t, int dim) {
    Json j;
    j["error_bar"] = t.error_bar;
    j["max_min_change"] = t.max_min_change;
    j["within_bar"] = t.within_bar;
    j["base_max_abs"] = t.base_max_abs;
    j["base"] = to_json(t.base, dim);
    j["doubled"] = to_json(t.doubled, dim);
    j["base_solve"] = to_json(t.base_solve);
    j["doubled_solve"] = to_json(t.doubled_solve);
    return j;
}

Json to_json(const SchrodingerRecord& r, int dim) {
    Json j;
    j["threshold"] = r.threshold;
    j["radii"] = r.radii;
    j["sup_outside"] = r.sup_outside;
    j["limsup_estimate"] = r.limsup_estimate;
    j["hypothesis_holds"] = r.hypothesis_holds;
    Json sweeps = Json::array();
    for (const PlaneSweepReport& sw : r.sweeps) sweeps.push_back(to_json(sw, dim));
    j["sweeps"] = sweeps;
    return j;
}

Json to_json(const DecayProbe& p, int dim) {
    Json j;
    j["x"] = point_json(p.x, dim);
    j["c"] = p.c;
    j["scaled_c"] = p.scaled_c;
    j["threshold"] = p.threshold;
    j["margin"] = p.margin;
    j["satisfied"] = p.satisfied;
    return j;
}

Json to_json(const RadialReport& r) {
    Json j;
    j["max_orbit_spread"] = r.max_orbit_spread;
    j["spread_radius"] = r.spread_radius;
    j["orbits"] = r.orbits;
    j["shell_violation"] = r.shell_violation;
    j["shell_radius"] = r.shell_radius;
    j["shell_mean"] = r.shell_mean;
    return j;
}

Json to_json(const AsymptoticReport& r) {
    Json j;
    j["applicable"] = r.applicable;
    j["mu"] = r.mu;
    j["M0"] = r.M0;
    j["eps0"] = r.eps0;
    j["truncation_error"] = r.truncation_error;
    j["monotone_beyond_M0"] = r.monotone_beyond_M0;
    j["within_range"] = r.within_range;
    j["near_mu"] = r.near_mu;
    Json bins = Json::array();
    for (const AsymptoticBin& b : r.bins)
        bins.push_back(Json{{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}, {"min", b.min}, {"max", b.max}});
    j["bins"] = bins;
    return j;
}

Json to_json(const MaLimitTable& t, int dim) {
    Json j;
    Json pts = Json::array();
    for (const Point& p : t.points) pts.push_back(point_json(p, dim));
    j["points"] = pts;
    j["hessian_root"] = t.hessian_root;
    Json rows = Json::array();
    for (const MaLimitRow& row : t.rows)
        rows.push_back(Json{{"s", row.s}, {"mean", row.mean}, {"spread", row.spread}, {"ratios", row.ratios}});
    j["rows"] = rows;
    j["spread_shrinks"] = t.spread_shrinks;
    return j;
}

Json to_json(const DecayFit& f) {
    Json j;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["radii"] = f.radii;
    j["values"] = f.values;
    j["excluded"] = f.excluded;
    j["sup_abs"] = f.sup_abs;
    return j;
}

Json to_json(const HypothesisReport& r) {
    Json j;
    j["h1"] = hypothesis_json(r.h1);
    j["h2"] = hypothesis_json(r.h2);
    j["h3"] = hypothesis_json(r.h3);
    return j;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(&os), columns_(header.size()) {
    if (header.empty()) throw InvalidArgument("CSV header must not be empty");
    row(header);
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> fields;
    fields.reserve(values.size());
    for (double v : values) fields.push_back(format_double(v));
    return row(fields);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& values) {
    if (values.size() != columns_) throw InvalidArgument("CSV row width does not match the header");
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) *os_ << ',';
        const std::string& v = values[k];
        if (v.find_first_of(",\"\n") != std::string::npos) {
            *os_ << '"';
            for (char ch : v) {
                if (ch == '"') *os_ << '"';
                *os_ << ch;
            }
            *os_ << '"';
        } else {
            *os_ << v;
        }
    }
    *os_ << '\n';
    return *this;
}

JsonReader::JsonReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw InvalidArgument((where_.empty() ? std::string("config") : where_) + ": expected an object");
}

bool JsonReader::has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
}

const Json& JsonReader::at(const std::string& key) {
    if (!has(key)) throw InvalidArgument(field(key) + ": required field is missing");
    return j_.at(key);
}

double JsonReader::num(const std::string& key, double def) { return has(key) ? as_num(j_.at(key), field(key)) : def; }
double JsonReader::num(const std::string& key) { return as_num(at(key), field(key)); }

int JsonReader::integer(const std::string& key, int def) {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) throw InvalidArgument(field(key) + ": expected an integer");
    return v.get<int>();
}

bool JsonReader::flag(const std::string& key, bool def) {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) throw InvalidArgument(field(key) + ": expected a boolean");
    return v.get<bool>();
}

std::string JsonReader::str(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) throw InvalidArgument(field(key) + ": expected a string");
    return v.get<std::string>();
}

std::string JsonReader::str(const std::string& key, const std::string& def) { return has(key) ? str(key) : def; }

std::vector<double> JsonReader::numbers(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_array()) throw InvalidArgument(field(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_num(v[i], field(key) + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<double> JsonReader::numbers(const std::string& key, std::vector<double> def) {
    return has(key) ? numbers(key) : def;
}

std::vector<Point> JsonReader::points(const std::string& key, int dim) {
    const Json& v = at(key);
    if (!v.is_array()) throw InvalidArgument(field(key) + ": expected an array of points");
    std::vector<Point> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(point_at(v[i], dim, field(key) + "[" + std::to_string(i) + "]"));
    return out;
}

Point JsonReader::point(const std::string& key, int dim) { return point_at(at(key), dim, field(key)); }

Mat JsonReader::matrix(const std::string& key) { return matrix_at(at(key), field(key)); }

std::string JsonReader::field(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

void JsonReader::finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
        if (!seen_.count(it.key())) throw InvalidArgument(field(it.key()) + ": unknown field");
}

double JsonReader::as_num(const Json& v, const std::string& where) {
    if (!v.is_number()) throw InvalidArgument(where + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InvalidArgument(where + ": expected a finite number");
    return x;
}

}  // namespace nlb
