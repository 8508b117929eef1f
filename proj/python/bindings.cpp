#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "khess/field_io.hpp"
#include "khess/hessian_algebra.hpp"
#include "khess/study.hpp"

namespace py = pybind11;
using namespace khess;

namespace {

ScalarField wrap_field(const py::object& fn, int n) {
    return [fn, n](const Point& x) {
        py::gil_scoped_acquire gil;
        if (n == 2) return fn(x[0], x[1]).cast<double>();
        return fn(x[0], x[1], x[2]).cast<double>();
    };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite-difference solvers for k-Hessian Dirichlet problems on the unit cube";

    py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
        .def_property_readonly("dim", &Grid::dim)
        .def_property_readonly("subdivisions", &Grid::subdivisions)
        .def_property_readonly("h", &Grid::spacing)
        .def_property_readonly("node_count", &Grid::node_count)
        .def_property_readonly("interior_count", &Grid::interior_count)
        .def("is_interior", &Grid::is_interior)
        .def("is_boundary", &Grid::is_boundary)
        .def("node_coords", &Grid::node_coords)
        .def("interior_nodes", &Grid::interior_nodes)
        .def("__repr__", [](const Grid& g) {
            std::ostringstream os;
            os << "Grid(dim=" << g.dim() << ", m=" << g.subdivisions() << ")";
            return os.str();
        });

    m.def(
        "build_grid",
        [](int dim, int m_) { return std::const_pointer_cast<Grid>(build_grid(dim, m_)); },
        py::arg("dim"), py::arg("subdivisions"));

    py::class_<MeshFunction>(m, "MeshFunction")
        .def(py::init([](std::shared_ptr<Grid> g, double fill) {
                 return MeshFunction(std::const_pointer_cast<const Grid>(g), fill);
             }),
             py::arg("grid"), py::arg("fill") = 0.0)
        .def_property_readonly(
            "grid",
            [](const MeshFunction& u) { return std::const_pointer_cast<Grid>(u.grid_ptr()); })
        .def("__len__", [](const MeshFunction& u) { return u.grid().node_count(); })
        .def("__getitem__", [](const MeshFunction& u, int fl) { return u[fl]; })
        .def("__setitem__", [](MeshFunction& u, int fl, double v) { u[fl] = v; })
        .def("values", [](const MeshFunction& u) { return u.data(); });

    py::class_<SymMat>(m, "SymMat")
        .def(py::init<int>(), py::arg("order"))
        .def_static("identity", &SymMat::identity)
        .def_property_readonly("order", &SymMat::order)
        .def("__call__", [](const SymMat& a, int i, int j) { return a(i, j); })
        .def("set", &SymMat::set)
        .def("trace", &SymMat::trace)
        .def("contract", &SymMat::contract);

    py::class_<Rational>(m, "Rational")
        .def_readonly("num", &Rational::num)
        .def_readonly("den", &Rational::den)
        .def("value", &Rational::value)
        .def("__repr__", [](const Rational& r) {
            return std::to_string(r.num) + "/" + std::to_string(r.den);
        });

    m.def("c_const", &c_const, py::arg("k"), py::arg("n"));
    m.def("s_k", &s_k, py::arg("A"), py::arg("k"));
    m.def("s_k_gradient", &s_k_gradient, py::arg("A"), py::arg("k"));
    m.def("eigenvalues_sym", &eigenvalues_sym, py::arg("A"));
    m.def("is_k_admissible", &is_k_admissible, py::arg("A"), py::arg("k"));

    m.def(
        "restrict_to_grid",
        [](const py::object& fn, std::shared_ptr<Grid> g) {
            return restrict_to_grid(wrap_field(fn, g->dim()),
                                    std::const_pointer_cast<const Grid>(g));
        },
        py::arg("fn"), py::arg("grid"));
    m.def("discrete_hessian", &discrete_hessian, py::arg("u"), py::arg("node"));
    m.def("discrete_laplacian", &discrete_laplacian, py::arg("u"), py::arg("node"));
    m.def("max_norm", &max_norm);
    m.def("max_diff", &max_diff);

    py::class_<Problem>(m, "Problem")
        .def_readonly("n", &Problem::n)
        .def_readonly("k", &Problem::k)
        .def_readonly("label", &Problem::label)
        .def_property_readonly("has_exact", [](const Problem& p) { return p.exact.has_value(); })
        .def("f", [](const Problem& p, const Point& x) { return p.f(x); })
        .def("g", [](const Problem& p, const Point& x) { return p.g(x); })
        .def("exact", [](const Problem& p, const Point& x) {
            if (!p.exact) throw std::invalid_argument("no exact solution");
            return (*p.exact)(x);
        });

    m.def("make_problem", &make_problem, py::arg("label"));
    m.def(
        "custom_problem",
        [](int n, int k, const py::object& f, const py::object& g, const py::object& exact,
           const std::string& label) {
            Problem p;
            p.n = n;
            p.k = k;
            p.f = wrap_field(f, n);
            p.g = wrap_field(g, n);
            if (!exact.is_none()) p.exact = wrap_field(exact, n);
            p.label = label;
            return p;
        },
        py::arg("n"), py::arg("k"), py::arg("f"), py::arg("g"), py::arg("exact") = py::none(),
        py::arg("label") = "custom");
    m.def("max_error", &max_error, py::arg("u"), py::arg("problem"));

    py::enum_<LinearMethod>(m, "LinearMethod")
        .value("direct_banded", LinearMethod::direct_banded)
        .value("stationary_sweep", LinearMethod::stationary_sweep)
        .value("krylov", LinearMethod::krylov);

    py::class_<LinearSolveParams>(m, "LinearSolveParams")
        .def(py::init<>())
        .def_readwrite("tolerance", &LinearSolveParams::tolerance)
        .def_readwrite("max_iterations", &LinearSolveParams::max_iterations)
        .def_readwrite("method", &LinearSolveParams::method);

    py::enum_<InitialGuessRule>(m, "InitialGuessRule")
        .value("paper", InitialGuessRule::paper)
        .value("maclaurin", InitialGuessRule::maclaurin);

    py::enum_<Termination>(m, "Termination")
        .value("converged", Termination::converged)
        .value("budget_exhausted", Termination::budget_exhausted)
        .value("diverged", Termination::diverged);

    py::class_<IterationConfig>(m, "IterationConfig")
        .def(py::init<>())
        .def_readwrite("tolerance", &IterationConfig::tolerance)
        .def_readwrite("max_outer", &IterationConfig::max_outer)
        .def_readwrite("linear", &IterationConfig::linear)
        .def_readwrite("clamp_radicand", &IterationConfig::clamp_radicand)
        .def_readwrite("initial_guess", &IterationConfig::initial_guess)
        .def_readwrite("c_override", &IterationConfig::c_override)
        .def_readwrite("inner_tolerance", &IterationConfig::inner_tolerance)
        .def_readwrite("divergence_guard", &IterationConfig::divergence_guard);

    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("iterations", &SolveReport::iterations)
        .def_readonly("residual_history", &SolveReport::residual_history)
        .def_readonly("diff_history", &SolveReport::diff_history)
        .def_readonly("min_laplacian_history", &SolveReport::min_laplacian_history)
        .def_readonly("termination", &SolveReport::termination)
        .def_readonly("final_residual", &SolveReport::final_residual)
        .def_readonly("final_diff", &SolveReport::final_diff)
        .def_readonly("coefficient_min_eigenvalue", &SolveReport::coefficient_min_eigenvalue)
        .def_readonly("inner_iterations", &SolveReport::inner_iterations);

    auto shared = [](std::shared_ptr<Grid> g) { return std::const_pointer_cast<const Grid>(g); };

    m.def("residual", &residual, py::arg("u"), py::arg("problem"));
    m.def(
        "initial_guess",
        [shared](const Problem& p, std::shared_ptr<Grid> g, InitialGuessRule rule,
                 const LinearSolveParams& lin) { return initial_guess(p, shared(g), rule, lin); },
        py::arg("problem"), py::arg("grid"), py::arg("rule") = InitialGuessRule::paper,
        py::arg("linear") = LinearSolveParams{});
    m.def(
        "fixed_point_solve",
        [shared](const Problem& p, std::shared_ptr<Grid> g, const IterationConfig& c) {
            return fixed_point_solve(p, shared(g), c);
        },
        py::arg("problem"), py::arg("grid"), py::arg("config") = IterationConfig{});
    m.def(
        "linearized_cofactor_solve",
        [shared](const Problem& p, std::shared_ptr<Grid> g, const MeshFunction& u0,
                 const IterationConfig& c) { return linearized_cofactor_solve(p, shared(g), u0, c); },
        py::arg("problem"), py::arg("grid"), py::arg("u0"), py::arg("config") = IterationConfig{});
    m.def(
        "newton_solve",
        [shared](const Problem& p, std::shared_ptr<Grid> g, const IterationConfig& c) {
            return newton_solve(p, shared(g), c);
        },
        py::arg("problem"), py::arg("grid"), py::arg("config") = IterationConfig{});
    m.def(
        "nonlinear_gs_solve",
        [shared](const Problem& p, std::shared_ptr<Grid> g, const IterationConfig& c) {
            return nonlinear_gs_solve(p, shared(g), c);
        },
        py::arg("problem"), py::arg("grid"), py::arg("config") = IterationConfig{});
    m.def(
        "partial_gs_solve",
        [shared](const Problem& p, std::shared_ptr<Grid> g, const IterationConfig& c) {
            return partial_gs_solve(p, shared(g), c);
        },
        py::arg("problem"), py::arg("grid"), py::arg("config") = IterationConfig{});
    m.def(
        "degenerate_ma_solve",
        [shared](const Problem& p, std::shared_ptr<Grid> g, const IterationConfig& c) {
            return degenerate_ma_solve(p, shared(g), c);
        },
        py::arg("problem"), py::arg("grid"), py::arg("config") = IterationConfig{});

    py::enum_<MethodTag>(m, "MethodTag")
        .value("fixed_point", MethodTag::fixed_point)
        .value("broyden", MethodTag::broyden)
        .value("newton", MethodTag::newton)
        .value("gauss_seidel", MethodTag::gauss_seidel)
        .value("partial_gs", MethodTag::partial_gs)
        .value("degenerate_ma", MethodTag::degenerate_ma);

    py::class_<StudyRow>(m, "StudyRow")
        .def_readonly("m", &StudyRow::m)
        .def_readonly("h", &StudyRow::h)
        .def_readonly("iterations", &StudyRow::iterations)
        .def_readonly("residual", &StudyRow::residual)
        .def_readonly("max_error", &StudyRow::max_error)
        .def_readonly("rate", &StudyRow::rate);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("problem", &RunConfig::problem)
        .def_readwrite("method", &RunConfig::method)
        .def_readwrite("m_values", &RunConfig::m_values)
        .def_readwrite("iteration", &RunConfig::iteration);

    m.def("parse_method", &parse_method);
    m.def("method_name", &method_name);
    m.def("run_convergence_study", &run_convergence_study, py::arg("config"));
    m.def("render_table", [](const std::vector<StudyRow>& rows) {
        const RenderedTable t = render_table(rows);
        return py::make_tuple(t.text, t.csv);
    });
    m.def("parse_study_csv", &parse_study_csv);

    m.def("export_slice", &export_slice, py::arg("u"), py::arg("axis"), py::arg("value"));
    m.def(
        "write_field_file",
        [](const std::string& path, const MeshFunction& u) {
            std::ofstream out(path);
            if (!out) throw std::ios_base::failure("cannot open " + path);
            write_field(out, u);
        },
        py::arg("path"), py::arg("u"));
    m.def(
        "read_field_file",
        [](const std::string& path) {
            std::ifstream in(path);
            if (!in) throw std::ios_base::failure("cannot open " + path);
            auto [grid, u] = read_field(in);
            return py::make_tuple(std::const_pointer_cast<Grid>(grid), u);
        },
        py::arg("path"));

    py::register_exception<SolveError>(m, "SolveError", PyExc_RuntimeError);
}
