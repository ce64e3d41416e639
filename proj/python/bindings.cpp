#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <vector>

#include "nlbellman/diagnostics.hpp"
#include "nlbellman/error.hpp"
#include "nlbellman/io.hpp"
#include "nlbellman/quadrature.hpp"
#include "nlbellman/solver.hpp"

namespace py = pybind11;
using namespace nlb;

namespace {

Json to_cpp(const py::object& obj) {
    if (obj.is_none()) return Json::object();
    const std::string text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return Json::parse(text);
}

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

ProblemSpec problem_of(const py::object& problem) {
    if (problem.is_none()) return ProblemSpec{};
    return problem_from_json(to_cpp(problem));
}

std::vector<Point> points_of(const py::array_t<double, py::array::c_style | py::array::forcecast>& pts, int dim) {
    if (pts.ndim() != 2 || pts.shape(1) != dim)
        throw InvalidArgument("points: expected an array of shape (m, " + std::to_string(dim) + ")");
    std::vector<Point> out(static_cast<std::size_t>(pts.shape(0)));
    auto a = pts.unchecked<2>();
    for (py::ssize_t i = 0; i < pts.shape(0); ++i)
        for (int d = 0; d < dim; ++d) out[static_cast<std::size_t>(i)][d] = a(i, d);
    return out;
}

/// (coordinates (N, n), values (N,)) of a grid function.
py::tuple grid_arrays(const GridFunction& u) {
    const Lattice& lat = u.lattice();
    const int n = u.dim();
    py::array_t<double> coords({static_cast<py::ssize_t>(lat.size()), static_cast<py::ssize_t>(n)});
    auto c = coords.mutable_unchecked<2>();
    for (std::size_t l = 0; l < lat.size(); ++l) {
        const Point p = lat.node(l);
        for (int d = 0; d < n; ++d) c(static_cast<py::ssize_t>(l), d) = p[d];
    }
    const std::vector<double>& v = u.values();
    py::array_t<double> values(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
    std::copy(v.begin(), v.end(), values.mutable_data());
    return py::make_tuple(coords, values);
}

py::array_t<double> evaluate(const py::object& function, const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
                             const std::string& op, const py::object& problem) {
    const ProblemSpec p = problem_of(problem);
    const int n = p.geometry.dim;
    const AnalyticFunction f = analytic_from_json(to_cpp(function), n);
    const std::vector<Point> pts = points_of(points, n);
    const Box box = p.sampling_box();
    const GridFunction u = make_grid_function(box, p.h, f);
    const QuadratureScheme scheme = QuadratureScheme::resolve(p.config, p.h, box.diameter(), p.scheme);
    py::array_t<double> out(static_cast<py::ssize_t>(pts.size()));
    auto o = out.mutable_unchecked<1>();
    if (op == "F_s") {
        const BellmanEvaluator ev(build_control_set(p.controls), p.config, scheme);
        for (std::size_t k = 0; k < pts.size(); ++k) o(static_cast<py::ssize_t>(k)) = ev.infimum(u, pts[k]).value;
    } else if (op == "L_I") {
        for (std::size_t k = 0; k < pts.size(); ++k)
            o(static_cast<py::ssize_t>(k)) = eval_L_A(u, ControlMatrix::identity(n), pts[k], p.config, scheme).value;
    } else if (op == "D_s") {
        for (std::size_t k = 0; k < pts.size(); ++k)
            o(static_cast<py::ssize_t>(k)) = eval_Ds(u, p.config.theta, pts[k], p.config, scheme).value;
    } else if (op == "frac_laplacian") {
        for (std::size_t k = 0; k < pts.size(); ++k)
            o(static_cast<py::ssize_t>(k)) = eval_fractional_laplacian(u, pts[k], p.config, scheme).value;
    } else {
        throw InvalidArgument("operator: expected F_s, L_I, D_s or frac_laplacian (got '" + op + "')");
    }
    return out;
}

py::tuple solve(const py::object& problem, const py::object& options) {
    const ProblemSpec p = problem_of(problem);
    const Json oj = to_cpp(options);
    JsonReader r(oj, "options");
    SolveOptions o;
    o.tol = r.num("tol", o.tol);
    o.max_iter = r.integer("max_iter", o.max_iter);
    o.max_policy = r.integer("max_policy", o.max_policy);
    o.damping = r.num("damping", o.damping);
    r.finish();
    SolveResult s;
    {
        py::gil_scoped_release release;
        s = solve_dirichlet(p, o);
    }
    const py::tuple grid = grid_arrays(s.u);
    return py::make_tuple(grid[0], grid[1], to_py(to_json(s.report)));
}

py::dict eigenpair(double radius, const py::object& problem, double h) {
    const ProblemSpec p = problem_of(problem);
    EigenPair e;
    {
        py::gil_scoped_release release;
        e = eigenpair_ball(radius, p.config, p.controls, h > 0.0 ? h : p.h, {}, p.scheme);
    }
    py::dict d;
    d["lambda1"] = e.lambda1;
    d["residual"] = e.residual;
    d["iterations"] = e.iterations;
    d["converged"] = e.converged;
    const py::tuple grid = grid_arrays(e.psi);
    d["coords"] = grid[0];
    d["psi"] = grid[1];
    return d;
}

py::array_t<double> control_set(const py::object& spec, int refinements) {
    ControlSet set = build_control_set(control_spec_from_json(to_cpp(spec)));
    if (refinements < 0) throw InvalidArgument("refine: must be nonnegative");
    for (int k = 0; k < refinements; ++k) set = refine(set);
    const int n = set.spec.n;
    py::array_t<double> out({static_cast<py::ssize_t>(set.size()), static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(n)});
    auto a = out.mutable_unchecked<3>();
    for (std::size_t m = 0; m < set.size(); ++m)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) a(static_cast<py::ssize_t>(m), i, k) = set.members[m].entries()(i, k);
    return out;
}

double reflection_mass_at(const std::vector<double>& x, int axis, double position, const py::object& problem) {
    const ProblemSpec p = problem_of(problem);
    if (static_cast<int>(x.size()) != p.config.n) throw InvalidArgument("x: dimension does not match config.n");
    Point pt{};
    for (std::size_t d = 0; d < x.size(); ++d) pt[d] = x[d];
    return reflection_mass(pt, Plane{axis, position}, build_control_set(p.controls), p.config);
}

py::dict decay_fit(const py::object& problem, const std::vector<double>& radii) {
    const ProblemSpec p = problem_of(problem);
    const DecayFit fit = decay_exponent_fit(build_control_set(p.controls), p.config, radii);
    return to_py(to_json(fit)).cast<py::dict>();
}

}  // namespace

PYBIND11_MODULE(_nlbellman, m) {
    m.doc() = "Nonlocal Bellman operators on uniform grids";

    // Translators are tried newest first, so the base class goes first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_RuntimeError);
    py::register_exception<MonotonicityError>(m, "MonotonicityError", PyExc_RuntimeError);

    m.def("fractional_laplacian_constant", &fractional_laplacian_constant, py::arg("n"), py::arg("s"));
    m.def("half_space_kernel_mass", &half_space_kernel_mass, py::arg("n"), py::arg("s"));
    m.def("schrodinger_threshold", &schrodinger_threshold, py::arg("p"));
    m.def("normalize_problem", [](const py::object& problem) { return to_py(to_json(problem_of(problem))); },
          py::arg("problem"), "Validated problem with every default filled in.");
    m.def("evaluate", &evaluate, py::arg("function"), py::arg("points"), py::arg("operator") = "F_s",
          py::arg("problem") = py::none(),
          "Operator values of a closed-form function sampled on the problem's lattice.");
    m.def("solve", &solve, py::arg("problem"), py::arg("options") = py::none(),
          "Dirichlet solve; returns (coords, values, report).");
    m.def("eigenpair_ball", &eigenpair, py::arg("radius"), py::arg("problem") = py::none(), py::arg("h") = 0.0);
    m.def("control_set", &control_set, py::arg("spec"), py::arg("refine") = 0,
          "Members of a control set as an array of shape (m, n, n).");
    m.def("reflection_mass", &reflection_mass_at, py::arg("x"), py::arg("axis"), py::arg("position"),
          py::arg("problem") = py::none());
    m.def("decay_fit", &decay_fit, py::arg("problem"), py::arg("radii"));
}
