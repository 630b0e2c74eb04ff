#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "czdo/config.hpp"
#include "czdo/czono.hpp"
#include "czdo/error.hpp"
#include "czdo/lp.hpp"
#include "czdo/observer.hpp"
#include "czdo/oracle.hpp"
#include "czdo/sim.hpp"

namespace py = pybind11;
using namespace czdo;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Set-membership disturbance observers on extended constrained zonotopes";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<Box>(m, "Box")
      .def(py::init<Vector, Vector>(), py::arg("lower"), py::arg("upper"))
      .def_readwrite("lower", &Box::lower)
      .def_readwrite("upper", &Box::upper)
      .def_property_readonly("dim", &Box::dim)
      .def("bounded", &Box::bounded)
      .def("all_bounded", &Box::all_bounded)
      .def("widths", &Box::widths)
      .def_static("whole_space", &Box::whole_space)
      .def_static("point", &Box::point)
      .def("__repr__", [](const Box& b) {
        return "Box(lower=" + py::repr(py::cast(b.lower)).cast<std::string>() +
               ", upper=" + py::repr(py::cast(b.upper)).cast<std::string>() + ")";
      });
  m.def("hull_diameter", &hull_diameter);

  py::class_<CZ>(m, "ConstrainedZonotope")
      .def(py::init<Matrix, Vector, Matrix, Vector, Vector>(), py::arg("G"), py::arg("c"), py::arg("A"),
           py::arg("b"), py::arg("h"))
      .def(py::init<Matrix, Vector, Vector>(), py::arg("G"), py::arg("c"), py::arg("h"))
      .def_property_readonly("G", &CZ::G)
      .def_property_readonly("c", &CZ::c)
      .def_property_readonly("A", &CZ::A)
      .def_property_readonly("b", &CZ::b)
      .def_property_readonly("h", &CZ::h)
      .def_property_readonly("dim", &CZ::dim)
      .def_property_readonly("num_generators", &CZ::num_generators)
      .def_property_readonly("num_constraints", &CZ::num_constraints);

  m.def("from_box", &cz::from_box);
  m.def("affine_image", py::overload_cast<const Matrix&, const CZ&, const Vector&>(&cz::affine_image), py::arg("R"),
        py::arg("z"), py::arg("t"));
  m.def("affine_image", py::overload_cast<const Matrix&, const CZ&>(&cz::affine_image), py::arg("R"), py::arg("z"));
  m.def("minkowski_sum", &cz::minkowski_sum);
  m.def("intersect_affine", &cz::intersect_affine, py::arg("z"), py::arg("C"), py::arg("y"));
  m.def("cartesian_product", &cz::cartesian_product);
  m.def("is_empty", &cz::is_empty, py::arg("z"), py::arg("feas_tol") = lp::kDefaultFeasTol);
  m.def("interval_hull", [](const CZ& z) { return cz::interval_hull(z); });
  m.def(
      "contains_point", [](const CZ& z, const Vector& p, double tol) { return cz::contains_point(z, p, tol); },
      py::arg("z"), py::arg("p"), py::arg("feas_tol") = 1e-6);

  m.def(
      "solve_lp",
      [](const Vector& c, const Matrix& A, const Vector& b, const Vector& lo, const Vector& hi) {
        const auto r = lp::solve({c, A, b, lo, hi});
        return py::make_tuple(lp::to_string(r.status), r.value, r.point);
      },
      py::arg("c"), py::arg("A"), py::arg("b"), py::arg("lower"), py::arg("upper"),
      "Minimize c'x subject to A x = b and lower <= x <= upper. Returns (status, value, x).");

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init<>())
      .def_readwrite("rank", &Tolerances::rank)
      .def_readwrite("lp", &Tolerances::lp)
      .def_readwrite("contain", &Tolerances::contain);

  py::class_<PlantModel>(m, "PlantModel")
      .def(py::init<Matrix, Matrix, Matrix, Matrix>(), py::arg("phi"), py::arg("gamma"), py::arg("g"),
           py::arg("xi"))
      .def_property_readonly("Phi", &PlantModel::Phi)
      .def_property_readonly("Gamma", &PlantModel::Gamma)
      .def_property_readonly("G", &PlantModel::G)
      .def_property_readonly("Xi", &PlantModel::Xi)
      .def_property_readonly("n", &PlantModel::n)
      .def_property_readonly("p", &PlantModel::p)
      .def_property_readonly("q", &PlantModel::q)
      .def_property_readonly("l", &PlantModel::l);

  py::class_<DisturbanceStepModel>(m, "DisturbanceStepModel")
      .def(py::init<CZ, double>(), py::arg("step_set"), py::arg("diameter_bound") = -1.0)
      .def_static("from_box", &DisturbanceStepModel::from_box)
      .def_readonly("step_set", &DisturbanceStepModel::step_set)
      .def_readonly("diameter_bound", &DisturbanceStepModel::diameter_bound);

  py::class_<ExistenceReport>(m, "ExistenceReport")
      .def_readonly("exists", &ExistenceReport::exists)
      .def_readonly("depth", &ExistenceReport::depth)
      .def_readonly("rank_O", &ExistenceReport::rank_O)
      .def_readonly("rank_O_aug", &ExistenceReport::rank_O_aug)
      .def_readonly("n_o", &ExistenceReport::n_o)
      .def_readonly("N_o", &ExistenceReport::N_o)
      .def_readonly("mu_o", &ExistenceReport::mu_o)
      .def_readonly("corollary1_reject", &ExistenceReport::corollary1_reject);
  m.def("existence_check", &existence_check, py::arg("plant"), py::arg("tol") = kDefaultRankTol);

  py::class_<DisturbanceEstimate>(m, "DisturbanceEstimate")
      .def_readonly("d_hat", &DisturbanceEstimate::d_hat)
      .def_readonly("hull", &DisturbanceEstimate::hull)
      .def_readonly("bounded", &DisturbanceEstimate::bounded)
      .def_readonly("diameter", &DisturbanceEstimate::diameter);

  py::enum_<WindowMode>(m, "WindowMode")
      .value("Recursive", WindowMode::Recursive)
      .value("Monolithic", WindowMode::Monolithic);

  py::class_<DisturbanceObserver>(m, "DisturbanceObserver")
      .def_static("build", &DisturbanceObserver::build, py::arg("plant"), py::arg("dist"), py::arg("x0_box"),
                  py::arg("delta"), py::arg("tol") = Tolerances{}, py::arg("mode") = WindowMode::Recursive)
      .def("step", &DisturbanceObserver::step, py::arg("u_prev"), py::arg("y"))
      .def_property_readonly("time", &DisturbanceObserver::time)
      .def_property_readonly("delta", &DisturbanceObserver::delta)
      .def_property_readonly("existence", &DisturbanceObserver::existence)
      .def_property_readonly("disturbance_set", &DisturbanceObserver::disturbance_set);

  m.def(
      "exact_posterior_hull",
      [](const PlantModel& plant, const CZ& step_set, const Box& x0_box, std::vector<Vector> inputs,
         std::vector<Vector> measurements) {
        return oracle::exact_posterior_hull({&plant, &step_set, x0_box, std::move(inputs), std::move(measurements)});
      },
      py::arg("plant"), py::arg("step_set"), py::arg("x0_box"), py::arg("inputs"), py::arg("measurements"),
      "Interval hull of the disturbance values consistent with all data, by linear programming.");

  py::class_<sim::Scenario>(m, "Scenario")
      .def(py::init([](const PlantModel& plant, const DisturbanceStepModel& dist, const Box& x0_box,
                       const Box& d0_range, int horizon, std::vector<int> deltas, int runs, std::uint64_t seed) {
             return sim::Scenario{plant, dist, x0_box, d0_range, {}, horizon, std::move(deltas), runs, seed, {}};
           }),
           py::arg("plant"), py::arg("dist"), py::arg("x0_box"), py::arg("d0_range"), py::arg("horizon"),
           py::arg("deltas"), py::arg("runs") = 1, py::arg("seed") = 0)
      .def_readonly("plant", &sim::Scenario::plant)
      .def_readonly("dist", &sim::Scenario::dist)
      .def_readwrite("x0_box", &sim::Scenario::x0_box)
      .def_readwrite("d0_range", &sim::Scenario::d0_range)
      .def_readwrite("inputs", &sim::Scenario::inputs)
      .def_readwrite("horizon", &sim::Scenario::horizon)
      .def_readwrite("deltas", &sim::Scenario::deltas)
      .def_readwrite("runs", &sim::Scenario::runs)
      .def_readwrite("seed", &sim::Scenario::seed)
      .def_readwrite("tol", &sim::Scenario::tol);

  py::class_<sim::Trajectory>(m, "Trajectory")
      .def_readonly("x", &sim::Trajectory::x)
      .def_readonly("d", &sim::Trajectory::d)
      .def_readonly("u", &sim::Trajectory::u)
      .def_readonly("y", &sim::Trajectory::y)
      .def_readonly("dd", &sim::Trajectory::dd);

  py::class_<sim::Trace>(m, "Trace")
      .def_readonly("d_true", &sim::Trace::d_true)
      .def_readonly("d_hat", &sim::Trace::d_hat)
      .def_readonly("err_inf", &sim::Trace::err_inf)
      .def_readonly("hull", &sim::Trace::hull)
      .def_readonly("hull_diam", &sim::Trace::hull_diam)
      .def_readonly("bounded", &sim::Trace::bounded)
      .def("__len__", &sim::Trace::size);

  py::class_<sim::DeltaSummary>(m, "DeltaSummary")
      .def_readonly("delta", &sim::DeltaSummary::delta)
      .def_readonly("warmup", &sim::DeltaSummary::warmup)
      .def_readonly("mean_err", &sim::DeltaSummary::mean_err)
      .def_readonly("max_err", &sim::DeltaSummary::max_err)
      .def_readonly("mean_agg", &sim::DeltaSummary::mean_agg)
      .def_readonly("max_agg", &sim::DeltaSummary::max_agg);

  py::class_<sim::MonteCarloSummary>(m, "MonteCarloSummary")
      .def_readonly("seed", &sim::MonteCarloSummary::seed)
      .def_readonly("runs", &sim::MonteCarloSummary::runs)
      .def_readonly("horizon", &sim::MonteCarloSummary::horizon)
      .def_readonly("distribution", &sim::MonteCarloSummary::distribution)
      .def_readonly("per_delta", &sim::MonteCarloSummary::per_delta);

  m.def("generate_trajectory", &sim::generate_trajectory, py::arg("scenario"), py::arg("run_index") = 0);
  m.def(
      "run_trace", [](const sim::Scenario& s, int delta, int run) { return sim::run_trace(s, delta, run); },
      py::arg("scenario"), py::arg("delta"), py::arg("run_index") = 0);
  m.def("monte_carlo", &sim::monte_carlo, py::arg("scenario"), py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "load_scenario", [](const std::string& path) { return config::load(path).scenario(); }, py::arg("path"),
      "Scenario described by a JSON configuration file.");
}
