#include "mixeig/bounds.hpp"
#include "mixeig/cli.hpp"
#include "mixeig/exact.hpp"
#include "mixeig/iterate.hpp"
#include "mixeig/shoot.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace mixeig;

namespace {

WeightFn to_weight(const py::object& w) {
    if (py::isinstance<py::str>(w)) return WeightFn::parse(w.cast<std::string>());
    return WeightFn::constant(w.cast<double>());
}

double to_length(const py::object& d) {
    if (py::isinstance<py::str>(d)) return cli::parse_length(d.cast<std::string>());
    return d.cast<double>();
}

Problem make_problem(const py::object& u, const py::object& v, const py::object& D, double p,
                     const std::string& boundary, double rel_tol) {
    ProblemSpec s;
    s.u = to_weight(u);
    s.v = to_weight(v);
    s.D = to_length(D);
    s.p = p;
    s.boundary = parse_boundary(boundary);
    s.quad.rel_tol = rel_tol;
    return Problem(s);
}

cli::RunConfig make_config(const Problem& problem) {
    cli::RunConfig c;
    c.u = problem.u();
    c.v = problem.v();
    c.D = problem.D();
    c.p = problem.p();
    c.boundary = problem.boundary();
    c.rel_tol = problem.quad().rel_tol;
    return c;
}

std::vector<double> values_of(const GridFunction& f) { return {f.values().begin(), f.values().end()}; }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bounds and approximations for the principal eigenvalue of the weighted one-dimensional p-Laplacian";

    py::register_exception<IterationError>(m, "IterationError", PyExc_RuntimeError);
    py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Problem>(m, "Problem")
        .def(py::init(&make_problem), py::arg("u") = 1.0, py::arg("v") = 1.0, py::arg("D") = 1.0, py::arg("p") = 2.0,
             py::arg("case") = "nd", py::arg("rel_tol") = 1e-10,
             "Weights are numbers or specs ('exp:-1', 'pow:2', '1 + x^2'); D may be float('inf') or 'inf'.")
        .def_property_readonly("p", &Problem::p)
        .def_property_readonly("p_star", &Problem::p_star)
        .def_property_readonly("k_p", [](const Problem& pr) { return pr.exponent().k_p(); })
        .def_property_readonly("D", &Problem::D)
        .def_property_readonly("truncation", &Problem::truncation)
        .def_property_readonly("case", [](const Problem& pr) { return to_string(pr.boundary()); })
        .def("u", &Problem::u_at)
        .def("v", &Problem::v_at)
        .def("mu", &Problem::mu, py::arg("a"), py::arg("b"))
        .def("nu_hat", &Problem::nu_hat, py::arg("a"), py::arg("b"))
        .def("with_p", &Problem::with_p)
        .def("with_truncation", &Problem::with_truncation)
        .def("__repr__", &Problem::describe);

    py::class_<BoundsReport>(m, "BoundsReport")
        .def_readonly("p", &BoundsReport::p)
        .def_readonly("truncation", &BoundsReport::truncation)
        .def_readonly("sigma_p", &BoundsReport::sigma_p)
        .def_readonly("sigma_argmax", &BoundsReport::sigma_argmax)
        .def_readonly("basic_lower", &BoundsReport::basic_lower)
        .def_readonly("basic_upper", &BoundsReport::basic_upper)
        .def_readonly("delta1", &BoundsReport::delta1)
        .def_readonly("delta1_prime", &BoundsReport::delta1_prime)
        .def_readonly("bar_delta1", &BoundsReport::bar_delta1)
        .def_readonly("lower_best", &BoundsReport::lower_best)
        .def_readonly("upper_best", &BoundsReport::upper_best)
        .def_readonly("positivity", &BoundsReport::positivity)
        .def("__repr__", &BoundsReport::describe);

    py::class_<ShootResult>(m, "ShootResult")
        .def_readonly("eigenvalue", &ShootResult::lambda)
        .def_readonly("iterations", &ShootResult::iterations)
        .def_readonly("residual", &ShootResult::residual)
        .def_readonly("truncation", &ShootResult::truncation)
        .def_property_readonly("bracket", [](const ShootResult& s) { return py::make_tuple(s.lambda_lo, s.lambda_hi); })
        .def_property_readonly("x", [](const ShootResult& s) { return std::vector<double>(s.g.grid().begin(), s.g.grid().end()); })
        .def_property_readonly("g", [](const ShootResult& s) { return values_of(s.g); })
        .def_property_readonly("dg", [](const ShootResult& s) { return values_of(s.dg); })
        .def_property_readonly("w", [](const ShootResult& s) { return values_of(s.w); })
        .def("__repr__", &ShootResult::describe);

    py::class_<ExactValue>(m, "ExactValue")
        .def_readonly("p", &ExactValue::p)
        .def_readonly("lambda_root", &ExactValue::lambda_root)
        .def_readonly("sigma_root", &ExactValue::sigma_root)
        .def_readonly("bar_delta1_root", &ExactValue::bar_delta1_root);

    py::class_<IterationState>(m, "IterationState")
        .def_readonly("n", &IterationState::n)
        .def_readonly("delta_n", &IterationState::delta_n)
        .def_readonly("history", &IterationState::history)
        .def("__repr__", &IterationState::describe);

    py::class_<FamilyOptimum>(m, "FamilyOptimum")
        .def_readonly("n", &FamilyOptimum::n)
        .def_readonly("value", &FamilyOptimum::value)
        .def_readonly("x0", &FamilyOptimum::x0)
        .def_readonly("x1", &FamilyOptimum::x1);

    py::class_<UpperSequence>(m, "UpperSequence")
        .def_readonly("delta_prime", &UpperSequence::delta_prime)
        .def_readonly("bar_delta", &UpperSequence::bar_delta)
        .def("__repr__", &UpperSequence::describe);

    py::class_<cli::SweepRow>(m, "SweepRow")
        .def_readonly("p", &cli::SweepRow::p)
        .def_readonly("sigma_root", &cli::SweepRow::sigma_root)
        .def_readonly("basic_lower_root", &cli::SweepRow::basic_lower_root)
        .def_readonly("basic_upper_root", &cli::SweepRow::basic_upper_root)
        .def_readonly("delta1_inv_root", &cli::SweepRow::delta1_inv_root)
        .def_readonly("delta1_prime_inv_root", &cli::SweepRow::delta1_prime_inv_root)
        .def_readonly("bar_delta1_inv_root", &cli::SweepRow::bar_delta1_inv_root)
        .def_readonly("lambda_root", &cli::SweepRow::lambda_root)
        .def_readonly("exact_lambda_root", &cli::SweepRow::exact_lambda_root)
        .def("ordered", [](const cli::SweepRow& r, double slack) { return cli::row_ordered(r, slack); },
             py::arg("slack") = 1e-6);

    m.def("sigma_p", py::overload_cast<const Problem&>(&sigma_p));
    m.def("basic_bounds", py::overload_cast<const Problem&>(&basic_bounds));
    m.def("compute_bounds", &compute_bounds);
    m.def("delta1", &delta1);
    m.def("delta1_prime", &delta1_prime);
    m.def("bar_delta1", &bar_delta1);
    m.def(
        "solve_eigenvalue",
        [](const Problem& pr, double rel_tol) {
            ShootConfig cfg;
            cfg.rel_tol = rel_tol;
            py::gil_scoped_release release;
            return solve_eigenvalue(pr, cfg);
        },
        py::arg("problem"), py::arg("rel_tol") = 1e-11);

    m.def("exact_values", &exact_values);
    m.def("exact_lambda", &exact_lambda);
    m.def("exact_sigma", &exact_sigma);
    m.def("exact_bar_delta1", &exact_bar_delta1);

    m.def(
        "iterate_lower",
        [](const Problem& pr, int n_max, int cells) {
            IterateConfig cfg;
            cfg.cells = cells;
            py::gil_scoped_release release;
            return iterate_lower(pr, n_max, cfg);
        },
        py::arg("problem"), py::arg("n_max") = 20, py::arg("cells") = 512);
    m.def(
        "iterate_upper",
        [](const Problem& pr, int n_max, int grid_m, int cells) {
            IterateConfig cfg;
            cfg.cells = cells;
            py::gil_scoped_release release;
            return iterate_upper(pr, n_max, grid_m, cfg);
        },
        py::arg("problem"), py::arg("n_max") = 3, py::arg("grid_m") = 24, py::arg("cells") = 512);

    m.def(
        "sweep",
        [](const Problem& pr, const std::string& p_range, unsigned threads) {
            cli::RunConfig c = make_config(pr);
            c.command = cli::Command::Figure;
            c.p_range = cli::parse_p_range(p_range);
            c.threads = threads;
            c.validate();
            py::gil_scoped_release release;
            return cli::sweep(c);
        },
        py::arg("problem"), py::arg("p_range"), py::arg("threads") = 0,
        "Figure rows for every p in 'LO:HI:STEP'; the exponent of `problem` is ignored.");
    m.def("to_csv", [](const std::vector<cli::SweepRow>& rows) {
        std::ostringstream os;
        cli::write_csv(os, rows);
        return os.str();
    });
    m.def(
        "certify",
        [](const Problem& pr, int n_max, double slack) {
            cli::RunConfig c = make_config(pr);
            c.n_max = n_max;
            cli::Certificate cert;
            {
                py::gil_scoped_release release;
                cert = cli::certify(c, slack);
            }
            return py::make_tuple(cert.ok, cert.lines);
        },
        py::arg("problem"), py::arg("n_max") = 20, py::arg("slack") = 1e-6,
        "Returns (ok, lines) for the chain of bounds around the shooting eigenvalue.");
}
