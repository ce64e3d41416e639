// Command-line driver: reads a JSON experiment config, runs one command and
// writes report.json plus CSV tables into the output directory.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "acceptance.hpp"
#include "nlbellman/diagnostics.hpp"
#include "nlbellman/error.hpp"
#include "nlbellman/io.hpp"
#include "nlbellman/quadrature.hpp"
#include "nlbellman/solver.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace nlb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;
constexpr std::uint64_t kDefaultSeed = 20240611;
constexpr const char* kVersion = "0.1.0";

struct Options {
    std::string config_path;
    std::string out = "nlbellman-out";
    std::int64_t seed = -1;
    int threads = 0;
    std::string format = "csv";
};

/// Long-format table; cells are numbers or strings.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Json>> rows;
};

/// Exclusive claim on the output directory for the duration of a run.
class OutputLock {
public:
    explicit OutputLock(const fs::path& dir) : path_(dir / ".lock") {
        fs::create_directories(dir);
        file_ = std::fopen(path_.c_str(), "wx");
        if (!file_) throw InvalidArgument("out: " + dir.string() + " is in use by another run or not writable");
    }
    ~OutputLock() {
        std::fclose(file_);
        std::error_code ec;
        fs::remove(path_, ec);
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    fs::path path_;
    std::FILE* file_ = nullptr;
};

class Run {
public:
    Run(std::string command, Options options) : command_(std::move(command)), options_(std::move(options)) {}

    const Json& config() const { return config_; }
    std::uint64_t seed() const { return seed_; }
    Json& result() { return result_; }
    Json& resolved() { return resolved_; }
    const ProblemSpec& problem() const { return problem_; }

    /// Parses the config file and validates the top-level keys.
    void load() {
        if (options_.format != "csv" && options_.format != "json")
            throw InvalidArgument("--format: expected csv or json");
        if (options_.config_path.empty()) {
            config_ = Json::object();
        } else {
            std::ifstream in(options_.config_path);
            if (!in) throw InvalidArgument("--config: cannot open " + options_.config_path);
            try {
                config_ = Json::parse(in);
            } catch (const Json::parse_error& e) {
                throw InvalidArgument(options_.config_path + ": " + e.what());
            }
        }
        JsonReader r(config_, "");
        if (r.has("command") && r.str("command") != command_)
            throw InvalidArgument("command: config is for '" + r.str("command") + "', not '" + command_ + "'");
        std::uint64_t seed = kDefaultSeed;
        if (r.has("seed")) {
            const Json& s = r.at("seed");
            if (!s.is_number_unsigned()) throw InvalidArgument("seed: expected a nonnegative integer");
            seed = s.get<std::uint64_t>();
        }
        seed_ = options_.seed >= 0 ? static_cast<std::uint64_t>(options_.seed) : seed;
        if (r.has("format")) {
            const std::string f = r.str("format");
            if (f != "csv" && f != "json") throw InvalidArgument("format: expected csv or json");
            if (options_.format == "csv" && !format_given_) options_.format = f;
        }
        for (const char* key : {"eval", "solve", "eigen", "diagnose", "controls", "oracle"}) r.has(key);
        if (r.has("problem")) problem_ = problem_from_json(r.at("problem"));
        r.finish();
        resolved_["problem"] = to_json(resolved_problem());
    }

    void mark_format_given() { format_given_ = true; }

    /// The command's section, or an empty object.
    Json section(const std::string& key) const {
        if (config_.contains(key) && !config_.at(key).is_null()) return config_.at(key);
        return Json::object();
    }

    ProblemSpec resolved_problem() const {
        ProblemSpec p = problem_;
        p.scheme = p.resolved_scheme();
        return p;
    }

    void add_table(Table t) { tables_.push_back(std::move(t)); }

    void add_grid(const std::string& name, const GridFunction& u) {
        Table t;
        t.name = name;
        static const char* axes[] = {"x", "y", "z"};
        const int n = u.dim();
        for (int d = 0; d < n; ++d) t.columns.push_back("i" + std::to_string(d));
        for (int d = 0; d < n; ++d) t.columns.push_back(axes[d]);
        t.columns.push_back("u");
        const Lattice& lat = u.lattice();
        for (std::size_t l = 0; l < lat.size(); ++l) {
            const Index idx = lat.multi(l);
            const Point p = lat.node(idx);
            std::vector<Json> row;
            for (int d = 0; d < n; ++d) row.push_back(idx[d]);
            for (int d = 0; d < n; ++d) row.push_back(p[d]);
            row.push_back(u.at(l));
            t.rows.push_back(std::move(row));
        }
        add_table(std::move(t));
    }

    /// Writes report.json and the tables; returns the list of files written.
    void write(const std::string& status) {
        const fs::path dir(options_.out);
        OutputLock lock(dir);
        Json report;
        report["tool"] = "nlbellman";
        report["version"] = kVersion;
        report["command"] = command_;
        report["status"] = status;
        report["seed"] = seed_;
        report["format"] = options_.format;
        report["config"] = resolved_;
        report["result"] = result_;
        Json files = Json::array();
        Json tables = Json::object();
        for (const Table& t : tables_) {
            if (options_.format == "csv") {
                const std::string file = t.name + ".csv";
                std::ofstream os(dir / file);
                CsvWriter w(os, t.columns);
                for (const auto& row : t.rows) {
                    std::vector<std::string> cells;
                    for (const Json& c : row) cells.push_back(c.is_string() ? c.get<std::string>() : cell(c));
                    w.row(cells);
                }
                if (!os) throw Error("cannot write " + (dir / file).string());
                files.push_back(file);
            } else {
                Json jt;
                jt["columns"] = t.columns;
                jt["rows"] = t.rows;
                tables[t.name] = jt;
            }
        }
        if (options_.format == "csv")
            report["tables"] = files;
        else
            report["tables"] = tables;
        strip_timing(report);
        std::ofstream os(dir / "report.json");
        os << report.dump(2) << '\n';
        if (!os) throw Error("cannot write " + (dir / "report.json").string());
    }

private:
    std::string command_;
    Options options_;
    bool format_given_ = false;
    Json config_;
    std::uint64_t seed_ = kDefaultSeed;
    ProblemSpec problem_;
    Json resolved_ = Json::object();
    Json result_ = Json::object();
    std::vector<Table> tables_;

    static std::string cell(const Json& c) {
        if (c.is_number_float()) return format_double(c.get<double>());
        if (c.is_null()) return "";
        return c.dump();
    }

    // Wall-clock timings go to stderr so that reports are reproducible byte for byte.
    static void strip_timing(Json& j) {
        if (j.is_object()) {
            j.erase("seconds");
            for (auto& [key, value] : j.items()) strip_timing(value);
        } else if (j.is_array()) {
            for (auto& v : j) strip_timing(v);
        }
    }
};

std::vector<Json> point_cells(const Point& p, int dim) {
    std::vector<Json> out;
    for (int d = 0; d < dim; ++d) out.push_back(p[d]);
    return out;
}

std::vector<std::string> axis_names(int dim) {
    static const char* axes[] = {"x", "y", "z"};
    return {axes, axes + dim};
}

/// Evaluation points: explicit list, or `random: {count, radius}` drawn from the seed.
std::vector<Point> sample_points(JsonReader& r, int dim, std::uint64_t seed) {
    if (r.has("points")) return r.points("points", dim);
    if (!r.has("random")) throw InvalidArgument(r.field("points") + ": required field is missing");
    JsonReader rr(r.at("random"), r.field("random"));
    const int count = rr.integer("count", 10);
    const double radius = rr.num("radius", 0.5);
    rr.finish();
    if (count < 1) throw InvalidArgument(rr.field("count") + ": must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Point> out;
    while (static_cast<int>(out.size()) < count) {
        Point p{};
        for (int d = 0; d < dim; ++d) p[d] = radius * unit(rng);
        if (norm(p, dim) <= radius) out.push_back(p);
    }
    return out;
}

AnalyticFunction function_at(JsonReader& r, int dim) { return analytic_from_json(r.at("function"), dim); }

/// Solves the problem, or samples `function` when the section provides one.
GridFunction source_function(Run& run, JsonReader& r, bool& converged) {
    const ProblemSpec& p = run.problem();
    converged = true;
    if (r.has("function")) return make_grid_function(p.sampling_box(), p.h, function_at(r, p.geometry.dim));
    const SolveResult s = solve_dirichlet(p);
    std::cerr << "solve: " << (s.report.converged ? "converged" : "not converged") << " in " << s.report.seconds
              << " s\n";
    converged = s.report.converged;
    run.result()["solve"] = to_json(s.report);
    return s.u;
}

int cmd_eval(Run& run) {
    const ProblemSpec& p = run.problem();
    const int n = p.geometry.dim;
    Json section = run.section("eval");
    JsonReader r(section, "eval");
    const AnalyticFunction f = function_at(r, n);
    const std::string op = r.str("operator", "F_s");
    Box box = p.sampling_box();
    if (r.has("half_width")) box = Box::cube(n, r.num("half_width"));
    Mat A = Mat::Identity(n, n);
    if (r.has("control")) A = r.matrix("control");
    const int eig = r.integer("eig_resolution", 5);
    const int ang = r.integer("angle_resolution", 8);
    const std::vector<Point> pts = sample_points(r, n, run.seed());
    r.finish();

    const GridFunction u = make_grid_function(box, p.h, f);
    const OperatorConfig& cfg = p.config;
    const QuadratureScheme scheme = QuadratureScheme::resolve(cfg, p.h, box.diameter(), p.scheme);
    run.resolved()["eval"] = section;
    run.resolved()["eval"]["scheme"] = to_json(scheme);

    Table t;
    t.name = "eval";
    t.columns = axis_names(n);
    for (const char* c : {"value", "near", "mid", "far", "error_bar", "argmin"}) t.columns.push_back(c);
    std::unique_ptr<BellmanEvaluator> bellman;
    if (op == "F_s") bellman = std::make_unique<BellmanEvaluator>(build_control_set(p.controls), cfg, scheme);
    const ControlMatrix control = op == "L_A" ? ControlMatrix(A) : ControlMatrix::identity(n);
    for (const Point& x : pts) {
        Evaluation e;
        long argmin = -1;
        if (op == "L_A") {
            e = eval_L_A(u, control, x, cfg, scheme);
        } else if (op == "F_s") {
            const InfimumResult inf = bellman->infimum(u, x);
            e = inf.detail;
            e.value = inf.value;
            argmin = static_cast<long>(inf.argmin);
        } else if (op == "D_s") {
            const InfimumResult inf = eval_Ds(u, cfg.theta, x, cfg, scheme, eig, ang);
            e = inf.detail;
            e.value = inf.value;
            argmin = static_cast<long>(inf.argmin);
        } else if (op == "frac_laplacian") {
            e = eval_fractional_laplacian(u, x, cfg, scheme);
        } else {
            throw InvalidArgument("eval.operator: expected L_A, F_s, D_s or frac_laplacian (got '" + op + "')");
        }
        std::vector<Json> row = point_cells(x, n);
        for (double v : {e.value, e.near, e.mid, e.far, e.error_bar}) row.push_back(v);
        row.push_back(argmin);
        t.rows.push_back(std::move(row));
    }
    run.result()["operator"] = op;
    run.result()["points"] = pts.size();
    run.add_table(std::move(t));
    run.write("ok");
    return kExitOk;
}

SolveOptions solve_options(JsonReader& r) {
    SolveOptions o;
    o.tol = r.num("tol", o.tol);
    o.max_iter = r.integer("max_iter", o.max_iter);
    o.max_policy = r.integer("max_policy", o.max_policy);
    o.damping = r.num("damping", o.damping);
    return o;
}

Json solve_options_json(const SolveOptions& o) {
    Json j;
    j["tol"] = o.tol;
    j["max_iter"] = o.max_iter;
    j["max_policy"] = o.max_policy;
    j["damping"] = o.damping;
    return j;
}

int cmd_solve(Run& run) {
    Json section = run.section("solve");
    JsonReader r(section, "solve");
    const SolveOptions o = solve_options(r);
    r.finish();
    run.resolved()["solve"] = solve_options_json(o);
    const SolveResult s = solve_dirichlet(run.problem(), o);
    std::cerr << "solve: " << s.report.outer_iterations << " outer iterations, " << s.report.seconds << " s\n";
    run.result()["report"] = to_json(s.report);
    run.result()["max_abs"] = s.u.max_abs();
    run.add_grid("solution", s.u);
    run.write(s.report.converged ? "ok" : "not_converged");
    return s.report.converged ? kExitOk : kExitNotConverged;
}

int cmd_eigen(Run& run) {
    const ProblemSpec& p = run.problem();
    Json section = run.section("eigen");
    JsonReader r(section, "eigen");
    const double R = r.num("radius", 1.0);
    EigenOptions o;
    o.tol = r.num("tol", o.tol);
    o.max_iter = r.integer("max_iter", o.max_iter);
    const double h = r.num("h", p.h);
    r.finish();
    Json resolved;
    resolved["radius"] = R;
    resolved["tol"] = o.tol;
    resolved["max_iter"] = o.max_iter;
    resolved["h"] = h;
    run.resolved()["eigen"] = resolved;

    const EigenPair e = eigenpair_ball(R, p.config, p.controls, h, o, p.scheme);
    Json& res = run.result();
    res["lambda1"] = e.lambda1;
    res["residual"] = e.residual;
    res["iterations"] = e.iterations;
    res["converged"] = e.converged;
    res["c_ns_lambda1"] = fractional_laplacian_constant(p.config.n, p.config.s) * e.lambda1;
    // M0 is reported for the unit ball only, where it is defined from lambda1(B_1).
    if (R == 1.0) {
        try {
            res["M0"] = estimate_M0(p.f, e, p.config.s);
        } catch (const InvalidArgument& err) {
            res["M0"] = nullptr;
            res["M0_reason"] = err.what();
        }
    }
    run.add_grid("psi", e.psi);
    run.write(e.converged ? "ok" : "not_converged");
    return e.converged ? kExitOk : kExitNotConverged;
}

double tol_from(JsonReader& r, double h, double scale) { return r.num("tol_factor", 5.0) * h * scale; }

int diagnose_planes(Run& run, JsonReader& r) {
    const ProblemSpec& p = run.problem();
    const int n = p.geometry.dim;
    bool converged = true;
    const GridFunction u = source_function(run, r, converged);
    const double tol = tol_from(r, p.h, u.max_abs());
    std::vector<double> axes_in = r.numbers("axes", {});
    std::vector<int> axes;
    for (double a : axes_in) axes.push_back(static_cast<int>(a));
    if (axes.empty())
        for (int d = 0; d < n; ++d) axes.push_back(d);
    const bool ball = p.geometry.kind == Geometry::Kind::ball;
    const double extent = r.has("extent") ? r.num("extent") : (ball ? p.geometry.radius : -1.0);
    const std::vector<double> centers = r.numbers("center", {});
    if (extent <= 0.0) throw InvalidArgument(r.field("extent") + ": required for non-ball geometries");
    r.finish();

    Table t;
    t.name = "planes";
    t.columns = {"axis", "lambda", "nodes", "min_w", "c"};
    Json sweeps = Json::array();
    bool symmetric = true;
    for (int axis : axes) {
        if (axis < 0 || axis >= n) throw InvalidArgument("diagnose.axes: axis out of range");
        const double center =
            centers.empty() ? (ball ? p.geometry.center[axis] : 0.0) : centers.at(static_cast<std::size_t>(axis));
        Point dir{};
        dir[axis] = 1.0;
        const auto lambdas = half_grid_lambdas(u.lattice(), axis, center, extent);
        const PlaneSweepReport rep = moving_planes_sweep(u, p.geometry, dir, lambdas, &p.f, tol, center);
        symmetric = symmetric && rep.symmetric;
        for (const PlaneRecord& rec : rep.records)
            t.rows.push_back({axis, rec.lambda, rec.nodes, rec.nodes ? Json(rec.min_w) : Json(nullptr), rec.c});
        sweeps.push_back(to_json(rep, n));
    }
    run.result()["tol"] = tol;
    run.result()["symmetric"] = symmetric;
    run.result()["sweeps"] = sweeps;
    run.add_table(std::move(t));
    run.write(converged ? "ok" : "not_converged");
    return converged ? kExitOk : kExitNotConverged;
}

int diagnose_slide(Run& run, JsonReader& r) {
    const ProblemSpec& p = run.problem();
    const std::vector<double> taus = r.numbers("taus", {0.25, 0.5, 1.0});
    const double probe_top = r.num("probe_top", 0.5 * p.geometry.height);
    const double factor = r.num("tol_factor", 5.0);
    Json solver = r.has("solver") ? r.at("solver") : Json::object();
    JsonReader sr(solver, "diagnose.solver");
    const SolveOptions o = solve_options(sr);
    sr.finish();
    r.finish();
    // The tolerance is relative to the solution, known only after the base solve;
    // the study returns raw minima and the verdict is applied here.
    const SlideTruncation st = sliding_truncation_study(p, taus, 0.0, probe_top, o);
    const double tol = factor * p.h * st.base_max_abs;
    bool monotone = true;
    for (const SlideRecord& rec : st.base.records) monotone = monotone && rec.min_w >= -tol;
    const bool converged = st.base_solve.converged && st.doubled_solve.converged;

    Table t;
    t.name = "slide";
    t.columns = {"height", "tau", "nodes", "min_w"};
    for (const SlideRecord& rec : st.base.records) t.rows.push_back({p.geometry.height, rec.tau, rec.nodes, rec.min_w});
    for (const SlideRecord& rec : st.doubled.records)
        t.rows.push_back({2.0 * p.geometry.height, rec.tau, rec.nodes, rec.min_w});
    run.result()["tol"] = tol;
    run.result()["monotone"] = monotone;
    run.result()["study"] = to_json(st, p.geometry.dim);
    run.add_table(std::move(t));
    run.write(converged ? "ok" : "not_converged");
    return converged ? kExitOk : kExitNotConverged;
}

int diagnose_radial(Run& run, JsonReader& r) {
    const ProblemSpec& p = run.problem();
    bool converged = true;
    const GridFunction u = source_function(run, r, converged);
    const Point center = r.has("center") ? r.point("center", p.geometry.dim) : p.geometry.center;
    const double max_radius = r.num("max_radius", p.geometry.radius);
    r.finish();
    const RadialReport rep = radial_symmetry_check(u, center, max_radius);
    Table t;
    t.name = "shells";
    t.columns = {"radius", "mean"};
    for (std::size_t k = 0; k < rep.shell_radius.size(); ++k) t.rows.push_back({rep.shell_radius[k], rep.shell_mean[k]});
    run.result()["radial"] = to_json(rep);
    run.add_table(std::move(t));
    run.write(converged ? "ok" : "not_converged");
    return converged ? kExitOk : kExitNotConverged;
}

int diagnose_asymptotic(Run& run, JsonReader& r) {
    const ProblemSpec& p = run.problem();
    const double eigen_h = r.num("eigen_h", 0.1);
    double M0 = 0.0;
    if (r.has("M0")) {
        M0 = r.num("M0");
    } else {
        const EigenPair e = eigenpair_ball(1.0, p.config, p.controls, eigen_h, {}, p.scheme);
        M0 = estimate_M0(p.f, e, p.config.s);
        run.result()["lambda1"] = e.lambda1;
    }
    const double bin_width = r.num("bin_width", 0.5);
    const double trunc = r.num("truncation_error", 0.0);
    const double range_max = r.num("range_max", 2.0);
    bool converged = true;
    const GridFunction u = source_function(run, r, converged);
    r.finish();
    const AsymptoticReport rep = asymptotic_sweep(u, p.geometry, p.f, M0, bin_width, trunc, range_max);
    Table t;
    t.name = "bins";
    t.columns = {"lo", "hi", "count", "min", "max"};
    for (const AsymptoticBin& b : rep.bins) t.rows.push_back({b.lo, b.hi, b.count, b.min, b.max});
    run.result()["asymptotic"] = to_json(rep);
    run.add_table(std::move(t));
    run.write(converged ? "ok" : "not_converged");
    return converged ? kExitOk : kExitNotConverged;
}

int diagnose_ma_limit(Run& run, JsonReader& r) {
    const ProblemSpec& p = run.problem();
    const int n = p.geometry.dim;
    const AnalyticFunction f = function_at(r, n);
    const std::vector<double> s_list = r.numbers("s", {0.6, 0.7, 0.8, 0.9, 0.95});
    const std::vector<Point> pts = sample_points(r, n, run.seed());
    const double theta = r.num("theta", p.config.theta);
    MaLimitOptions o;
    o.h = r.num("h", o.h);
    o.half_width = r.num("half_width", o.half_width);
    o.eig_resolution = r.integer("eig_resolution", o.eig_resolution);
    o.angle_resolution = r.integer("angle_resolution", o.angle_resolution);
    r.finish();
    const MaLimitTable tab = ma_limit_sweep(f, s_list, pts, theta, o);
    Table t;
    t.name = "ma_limit";
    t.columns = {"s", "point"};
    for (const std::string& a : axis_names(n)) t.columns.push_back(a);
    t.columns.push_back("ratio");
    for (const MaLimitRow& row : tab.rows)
        for (std::size_t k = 0; k < pts.size(); ++k) {
            std::vector<Json> cells{row.s, k};
            for (const Json& c : point_cells(pts[k], n)) cells.push_back(c);
            cells.push_back(row.ratios[k]);
            t.rows.push_back(std::move(cells));
        }
    run.result()["ma_limit"] = to_json(tab, n);
    run.add_table(std::move(t));
    run.write("ok");
    return kExitOk;
}

int diagnose_decay(Run& run, JsonReader& r) {
    const ProblemSpec& p = run.problem();
    const int n = p.geometry.dim;
    std::vector<double> radii = r.numbers("radii", {});
    if (radii.empty())
        for (int k = 0; k < 8; ++k) radii.push_back(3.0 * std::pow(10.0 / 3.0, k / 7.0));
    DecayOptions o;
    o.h = r.num("h", o.h);
    o.half_width = r.num("half_width", o.half_width);
    o.sup_spacing = r.num("sup_spacing", o.sup_spacing);
    const std::vector<Point> probes = r.has("probe_points") ? r.points("probe_points", n) : std::vector<Point>{};
    r.finish();
    const ControlSet controls = build_control_set(p.controls);
    const DecayFit fit = decay_exponent_fit(controls, p.config, radii, o);
    Table t;
    t.name = "decay";
    t.columns = {"r", "value"};
    for (std::size_t k = 0; k < fit.radii.size(); ++k) t.rows.push_back({fit.radii[k], fit.values[k]});
    run.add_table(std::move(t));
    run.result()["fit"] = to_json(fit);
    run.result()["target_slope"] = -(n + 2.0 * p.config.s);
    if (!probes.empty()) {
        Table th;
        th.name = "thresholds";
        th.columns = axis_names(n);
        for (const char* c : {"reflection_mass", "K"}) th.columns.push_back(c);
        for (const Point& x : probes) {
            std::vector<Json> row = point_cells(x, n);
            row.push_back(reflection_mass(x, Plane{0, 0.0}, controls, p.config));
            row.push_back(decay_threshold_bisect(x, controls, p.config));
            th.rows.push_back(std::move(row));
        }
        run.add_table(std::move(th));
    }
    run.write("ok");
    return kExitOk;
}

int cmd_diagnose(Run& run, const std::string& mode) {
    Json section = run.section("diagnose");
    JsonReader r(section, "diagnose");
    run.resolved()["diagnose"] = section;
    run.resolved()["diagnose"]["mode"] = mode;
    if (r.has("mode") && r.str("mode") != mode)
        throw InvalidArgument("diagnose.mode: config is for '" + r.str("mode") + "', not '" + mode + "'");
    if (mode == "planes") return diagnose_planes(run, r);
    if (mode == "slide") return diagnose_slide(run, r);
    if (mode == "radial") return diagnose_radial(run, r);
    if (mode == "asymptotic") return diagnose_asymptotic(run, r);
    if (mode == "ma-limit") return diagnose_ma_limit(run, r);
    if (mode == "decay") return diagnose_decay(run, r);
    throw InvalidArgument("diagnose: unknown mode '" + mode + "'");
}

int cmd_controls(Run& run) {
    Json section = run.section("controls");
    JsonReader r(section, "controls");
    const int refinements = r.integer("refine", 0);
    r.finish();
    if (refinements < 0) throw InvalidArgument("controls.refine: must be nonnegative");
    run.resolved()["controls"]["refine"] = refinements;
    ControlSet set = build_control_set(run.problem().controls);
    for (int k = 0; k < refinements; ++k) set = refine(set);
    const int n = set.spec.n;
    Table t;
    t.name = "controls";
    t.columns = {"index"};
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) t.columns.push_back("a" + std::to_string(i) + std::to_string(k));
    for (const char* c : {"det", "lambda_min", "lambda_max"}) t.columns.push_back(c);
    for (std::size_t m = 0; m < set.size(); ++m) {
        const ControlMatrix& A = set.members[m];
        std::vector<Json> row{m};
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) row.push_back(A.entries()(i, k));
        for (double v : {A.det(), A.lambda_min(), A.lambda_max()}) row.push_back(v);
        t.rows.push_back(std::move(row));
    }
    run.result()["size"] = set.size();
    run.result()["admissible"] = set.admissible();
    run.result()["reflection_closed"] = set.reflection_closed();
    run.add_table(std::move(t));
    run.write("ok");
    return kExitOk;
}

int cmd_oracle(Run& run) {
    const ProblemSpec& p = run.problem();
    const int n = p.geometry.dim;
    Json section = run.section("oracle");
    JsonReader r(section, "oracle");
    const AnalyticFunction f = function_at(r, n);
    const std::string name = r.str("operator", "frac_laplacian_fourier");
    const double s = r.num("s", p.config.s);
    const Mat A = r.has("control") ? r.matrix("control") : Mat::Identity(n, n);
    const std::vector<Point> pts = sample_points(r, n, run.seed());
    r.finish();
    const oracle::Operator op = [&] {
        try {
            return oracle::parse_operator(name);
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(std::string("oracle.operator: ") + e.what());
        }
    }();
    Table t;
    t.name = "oracle";
    t.columns = axis_names(n);
    t.columns.push_back("value");
    for (const Point& x : pts) {
        std::vector<Json> row = point_cells(x, n);
        row.push_back(oracle::oracle_eval(f, op, x, s, A));
        t.rows.push_back(std::move(row));
    }
    run.result()["operator"] = std::string(oracle::operator_name(op));
    run.result()["s"] = s;
    run.add_table(std::move(t));
    run.write("ok");
    return kExitOk;
}

struct AcceptanceFlags {
    std::vector<int> only;
    double tighten = 1.0;
    double c_ns_factor = 1.0;
    bool coarse_central = false;
};

int cmd_acceptance(const Options& options, const AcceptanceFlags& flags) {
    acceptance::RunOptions o;
    o.seed = options.seed >= 0 ? static_cast<std::uint64_t>(options.seed) : kDefaultSeed;
    o.tighten = flags.tighten;
    o.mutation.c_ns_factor = flags.c_ns_factor;
    o.mutation.coarse_central_stencil = flags.coarse_central;
    std::vector<int> ids = flags.only;
    if (ids.empty()) {
        ids.resize(acceptance::kCriteria);
        std::iota(ids.begin(), ids.end(), 1);
    }
    std::vector<acceptance::Result> results;
    for (int id : ids) {
        results.push_back(acceptance::run_criterion(id, o));
        acceptance::print(std::cout, results.back());
        std::cout << std::endl;
    }
    const fs::path dir(options.out);
    OutputLock lock(dir);
    std::ofstream os(dir / "acceptance.csv");
    CsvWriter w(os, {"criterion", "name", "pass", "numeric_pass", "seconds", "budget_seconds", "detail"});
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass();
        w.row(std::vector<std::string>{std::to_string(r.id), r.name, r.pass() ? "1" : "0", r.numeric_pass ? "1" : "0",
                                       format_double(r.seconds), format_double(r.budget_seconds), r.detail});
    }
    return all ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal Bellman operators: evaluation, Dirichlet solves and qualitative diagnostics"};
    app.require_subcommand(1);
    app.fallthrough();
    Options options;
    app.add_option("--config", options.config_path, "JSON experiment config");
    app.add_option("--out", options.out, "Output directory")->capture_default_str();
    app.add_option("--seed", options.seed, "Seed for random sampling (overrides the config)");
    app.add_option("--threads", options.threads, "Worker threads (0: runtime default)");
    auto* format = app.add_option("--format", options.format, "Table format")
                       ->check(CLI::IsMember({"csv", "json"}))
                       ->capture_default_str();

    std::string mode;
    AcceptanceFlags acc;
    std::vector<CLI::App*> commands;
    commands.push_back(app.add_subcommand("eval", "Evaluate L_A, F_s, D_s or the fractional Laplacian of a closed form"));
    commands.push_back(app.add_subcommand("solve", "Solve the Dirichlet problem"));
    commands.push_back(app.add_subcommand("eigen", "First eigenpair in a ball"));
    auto* diag = app.add_subcommand("diagnose", "Qualitative diagnostics");
    diag->add_option("mode", mode, "planes | slide | radial | asymptotic | ma-limit | decay")
        ->required()
        ->check(CLI::IsMember({"planes", "slide", "radial", "asymptotic", "ma-limit", "decay"}));
    commands.push_back(diag);
    commands.push_back(app.add_subcommand("controls", "Build and export a control set"));
    commands.push_back(app.add_subcommand("oracle", "Dense reference evaluations"));
    auto* accept = app.add_subcommand("acceptance", "Run the acceptance criteria");
    accept->add_option("--only", acc.only, "Criteria to run")->check(CLI::Range(1, acceptance::kCriteria));
    accept->add_option("--tighten", acc.tighten, "Divide every numeric tolerance by this factor");
    accept->add_option("--mutate-c-ns", acc.c_ns_factor, "Multiply C_{n,s} in the evaluator");
    accept->add_flag("--mutate-stencil", acc.coarse_central, "Use the central near stencil with a coarse near radius");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

#ifdef _OPENMP
    if (options.threads > 0) omp_set_num_threads(options.threads);
#endif

    try {
        if (accept->parsed()) return cmd_acceptance(options, acc);
        CLI::App* chosen = nullptr;
        for (CLI::App* c : commands)
            if (c->parsed()) chosen = c;
        const std::string command = chosen->get_name();
        Run run(command, options);
        if (format->count() > 0) run.mark_format_given();
        run.load();
        const auto t0 = std::chrono::steady_clock::now();
        int status = kExitOk;
        if (command == "eval") status = cmd_eval(run);
        if (command == "solve") status = cmd_solve(run);
        if (command == "eigen") status = cmd_eigen(run);
        if (command == "diagnose") status = cmd_diagnose(run, mode);
        if (command == "controls") status = cmd_controls(run);
        if (command == "oracle") status = cmd_oracle(run);
        std::cerr << command << ": " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                  << " s, report in " << options.out << "/report.json\n";
        return status;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const EvaluationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const MonotonicityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}
