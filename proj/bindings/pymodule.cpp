#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "doubling/errors.hpp"
#include "doubling/finite_rank.hpp"
#include "doubling/fixed_point.hpp"
#include "doubling/induced_map.hpp"
#include "doubling/run.hpp"
#include "doubling/transfer_operator.hpp"

namespace py = pybind11;
using namespace doubling;

using FixedPointPtr = std::shared_ptr<RenormFixedPoint>;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Expanding direction and rate of the period-doubling operator";
    m.attr("__version__") = "1.0.0";

    py::class_<Interval>(m, "Interval")
        .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
        .def_readonly("lo", &Interval::lo)
        .def_readonly("hi", &Interval::hi)
        .def("mid", &Interval::mid)
        .def("length", &Interval::length)
        .def("contains", &Interval::contains, py::arg("x"), py::arg("slack") = 0.0)
        .def("__repr__", [](const Interval& iv) {
            return "Interval(" + format_double(iv.lo) + ", " +
                   format_double(iv.hi) + ")";
        });

    py::class_<EvenPolynomial>(m, "EvenPolynomial")
        .def(py::init<std::vector<double>>(), py::arg("coefficients"))
        .def("__call__", &EvenPolynomial::operator(), py::arg("x"))
        .def("derivative", &EvenPolynomial::derivative, py::arg("x"))
        .def("second_derivative", &EvenPolynomial::second_derivative, py::arg("x"))
        .def_property_readonly("degree", &EvenPolynomial::degree)
        .def_property_readonly("coefficients", &EvenPolynomial::coefficients);

    py::class_<RenormFixedPoint, FixedPointPtr>(m, "FixedPoint")
        .def("__call__", &RenormFixedPoint::eval, py::arg("x"))
        .def("prime", &RenormFixedPoint::eval_prime, py::arg("x"))
        .def("second", &RenormFixedPoint::eval_second, py::arg("x"))
        .def("invert", &RenormFixedPoint::invert, py::arg("y"))
        .def_property_readonly("alpha", &RenormFixedPoint::alpha)
        .def_property_readonly("residual", &RenormFixedPoint::residual)
        .def_property_readonly("g", &RenormFixedPoint::g)
        .def("to_json",
             [](const RenormFixedPoint& fp) { return fixed_point_to_json(fp); });

    m.def(
        "solve_fixed_point",
        [](int degree, double tol, int max_newton_iters) {
            return std::make_shared<RenormFixedPoint>(
                solve_fixed_point(degree, tol, max_newton_iters));
        },
        py::arg("degree") = 40, py::arg("tol") = 1e-12,
        py::arg("max_newton_iters") = 50);
    m.def("fixed_point_from_json", [](const std::string& text) {
        return std::make_shared<RenormFixedPoint>(fixed_point_from_json(text));
    });

    py::class_<CascadeOracleResult>(m, "CascadeResult")
        .def_readonly("depth", &CascadeOracleResult::depth)
        .def_readonly("superstable_params",
                      &CascadeOracleResult::superstable_params)
        .def_readonly("delta_estimates", &CascadeOracleResult::delta_estimates)
        .def_readonly("alpha_estimates", &CascadeOracleResult::alpha_estimates);
    m.def("cascade_oracle", &cascade_oracle, py::arg("depth"));

    py::class_<SigmaSystem>(m, "Sigma")
        .def(py::init([](FixedPointPtr fp) {
                 return SigmaSystem::build(std::move(fp));
             }),
             py::arg("fixed_point"))
        .def("__call__", &SigmaSystem::apply, py::arg("x"))
        .def("prime", &SigmaSystem::prime, py::arg("x"))
        .def("branch_apply", &SigmaSystem::branch_apply, py::arg("branch"),
             py::arg("x"))
        .def("branch_inverse", &SigmaSystem::branch_inverse, py::arg("branch"),
             py::arg("y"))
        .def_property_readonly("J", &SigmaSystem::J)
        .def_property_readonly("J0", &SigmaSystem::J0)
        .def_property_readonly("J1", &SigmaSystem::J1)
        .def_property_readonly("alpha", &SigmaSystem::alpha)
        .def_property_readonly("fixed_point", [](const SigmaSystem& s) {
            return std::const_pointer_cast<RenormFixedPoint>(s.fixed_point_ptr());
        });

    py::class_<LevelPartition>(m, "LevelPartition")
        .def_readonly("level", &LevelPartition::level)
        .def_readonly("intervals", &LevelPartition::intervals)
        .def_readonly("codes", &LevelPartition::codes)
        .def_readonly("parent", &LevelPartition::parent)
        .def_readonly("betas", &LevelPartition::betas);
    m.def("refine_partition", &refine_partition, py::arg("sigma"),
          py::arg("level"));
    m.def("refine_step", &refine_step, py::arg("sigma"), py::arg("partition"));

    py::class_<PeriodicOrbitSet>(m, "PeriodicOrbitSet")
        .def_readonly("period", &PeriodicOrbitSet::period)
        .def_readonly("points", &PeriodicOrbitSet::points)
        .def_readonly("multipliers", &PeriodicOrbitSet::multipliers)
        .def_readonly("weight_products", &PeriodicOrbitSet::weight_products);
    m.def("periodic_points", &periodic_points, py::arg("sigma"), py::arg("n"));
    m.def("pressure_sum", &pressure_sum, py::arg("sigma"), py::arg("n"));
    m.def("pressure_estimate", &pressure_estimate, py::arg("sigma"), py::arg("n"));

    py::class_<AttractorReport>(m, "AttractorReport")
        .def_readonly("orbit_len", &AttractorReport::orbit_len)
        .def_readonly("max_containment_violation",
                      &AttractorReport::max_containment_violation)
        .def_readonly("max_conjugacy_violation",
                      &AttractorReport::max_conjugacy_violation)
        .def_readonly("max_violation", &AttractorReport::max_violation);
    m.def("verify_attractor", &verify_attractor, py::arg("sigma"),
          py::arg("orbit_len") = 4096);

    py::class_<FiniteRankOperator>(m, "FiniteRankOperator")
        .def_property_readonly("level", &FiniteRankOperator::level)
        .def_property_readonly("dim", &FiniteRankOperator::dim)
        .def_property_readonly("alpha", &FiniteRankOperator::alpha)
        .def("apply", &FiniteRankOperator::apply, py::arg("v"))
        .def("dense", &FiniteRankOperator::dense);
    m.def("assemble_operator", &assemble_operator, py::arg("sigma"),
          py::arg("partition"));
    m.def("in_cone", &in_cone, py::arg("v"), py::arg("tol") = 0.0);

    py::class_<PowerIterationResult>(m, "PowerIterationResult")
        .def_readonly("lambda_", &PowerIterationResult::lambda)
        .def_readonly("lambda_identity", &PowerIterationResult::lambda_identity)
        .def_readonly("v", &PowerIterationResult::v)
        .def_readonly("iterations", &PowerIterationResult::iterations)
        .def_readonly("final_shift", &PowerIterationResult::final_shift)
        .def_readonly("residual", &PowerIterationResult::residual);
    m.def("power_iterate", &power_iterate, py::arg("operator"), py::arg("v0"),
          py::arg("tol") = 1e-12, py::arg("max_iters") = 100000);
    m.def("embed", &embed, py::arg("v"), py::arg("partition"));

    py::class_<Level2ClosedForm>(m, "Level2ClosedForm")
        .def_readonly("lambda_", &Level2ClosedForm::lambda)
        .def_readonly("t21", &Level2ClosedForm::t21);
    m.def("closed_form_lambda2", &closed_form_lambda2, py::arg("alpha"),
          py::arg("beta21"), py::arg("beta22"));

    py::class_<LevelRecord>(m, "LevelRecord")
        .def_readonly("n", &LevelRecord::n)
        .def_readonly("lambda_", &LevelRecord::lambda)
        .def_readonly("lambda_ratio", &LevelRecord::lambda_ratio)
        .def_readonly("lambda_applied", &LevelRecord::lambda_applied)
        .def_readonly("iterations", &LevelRecord::iterations)
        .def_readonly("residual", &LevelRecord::residual)
        .def_readonly("shift", &LevelRecord::shift)
        .def_readonly("failed", &LevelRecord::failed)
        .def_readonly("error", &LevelRecord::error);

    py::class_<ProgramTrace>(m, "ProgramTrace")
        .def_readonly("records", &ProgramTrace::records)
        .def_readonly("direction", &ProgramTrace::direction)
        .def_readonly("last_level", &ProgramTrace::last_level)
        .def_readonly("lambda_extrapolated", &ProgramTrace::lambda_extrapolated);
    m.def("run_program", &run_program, py::arg("sigma"), py::arg("n_max"),
          py::arg("tol") = 1e-12);
    m.def("validate_trace", &validate_trace, py::arg("trace"), py::arg("alpha"));

    py::class_<DirectionSamples>(m, "DirectionSamples")
        .def_readonly("values", &DirectionSamples::values)
        .def_readonly("gap_flags", &DirectionSamples::gap_flags);
    m.def("pushforward_direction", &pushforward_direction, py::arg("sigma"),
          py::arg("v"), py::arg("partition"), py::arg("x_grid"));

    py::class_<SpectrumResult>(m, "SpectrumResult")
        .def_readonly("n", &SpectrumResult::n)
        .def_readonly("eigenvalues", &SpectrumResult::eigenvalues)
        .def_readonly("leading", &SpectrumResult::leading)
        .def_readonly("converged", &SpectrumResult::converged);
    m.def("collocation_spectrum", &collocation_spectrum, py::arg("sigma"),
          py::arg("n"), py::arg("stability_tol") = 1e-8);
    m.def("apply_transfer", &apply_transfer, py::arg("sigma"), py::arg("v"),
          py::arg("z"));
    m.def(
        "known_eigenvector",
        [](FixedPointPtr fp, int order) { return known_eigenvector(fp, order); },
        py::arg("fixed_point"), py::arg("m"));
    m.def("known_eigenvalue", &known_eigenvalue, py::arg("sigma"), py::arg("m"));
    m.def("known_pair_residual", &known_pair_residual, py::arg("sigma"),
          py::arg("m"), py::arg("grid_size") = 400);

    py::class_<ToyModel>(m, "ToyModel")
        .def_readonly("a", &ToyModel::a)
        .def_readonly("b", &ToyModel::b)
        .def_readonly("twist", &ToyModel::twist)
        .def_readonly("I", &ToyModel::I)
        .def_readonly("I0", &ToyModel::I0)
        .def_readonly("I1", &ToyModel::I1);
    m.def("make_toy", &make_toy, py::arg("a"), py::arg("b"),
          py::arg("twist") = 0.5);
    m.def("toy_spectrum_exact", &toy_spectrum_exact, py::arg("model"),
          py::arg("n_max"));
    m.def("toy_spectrum_numeric", &toy_spectrum_numeric, py::arg("model"),
          py::arg("n"));
    m.def("toy_leading_is_lambda0", &toy_leading_is_lambda0, py::arg("model"),
          py::arg("n_max") = 24);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("degree", &RunConfig::degree)
        .def_readwrite("solver_tol", &RunConfig::solver_tol)
        .def_readwrite("n_max", &RunConfig::n_max)
        .def_readwrite("collocation_n", &RunConfig::collocation_n)
        .def_readwrite("cascade_depth", &RunConfig::cascade_depth)
        .def_readwrite("output_dir", &RunConfig::output_dir)
        .def_readwrite("emit_eigenvectors", &RunConfig::emit_eigenvectors)
        .def_readwrite("seed", &RunConfig::seed);
    m.def("validate_config", &validate_config, py::arg("config"));

    py::class_<RunReport>(m, "RunReport")
        .def_readonly("config", &RunReport::config)
        .def_readonly("alpha", &RunReport::alpha)
        .def_readonly("solver_residual", &RunReport::solver_residual)
        .def_readonly("trace", &RunReport::trace)
        .def_readonly("delta_program", &RunReport::delta_program)
        .def_readonly("delta_collocation", &RunReport::delta_collocation)
        .def_readonly("delta_cascade", &RunReport::delta_cascade)
        .def_readonly("alpha_cascade", &RunReport::alpha_cascade)
        .def_readonly("max_pressure_slack", &RunReport::max_pressure_slack)
        .def_readonly("attractor_violation", &RunReport::attractor_violation)
        .def_readonly("cone_spot_check", &RunReport::cone_spot_check);
    m.def("run_all", &run_all, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
}
