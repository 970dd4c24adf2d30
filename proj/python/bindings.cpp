#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wstress/distributions.hpp"
#include "wstress/error.hpp"
#include "wstress/isotonic.hpp"
#include "wstress/reweight.hpp"
#include "wstress/risk_measures.hpp"
#include "wstress/scenario.hpp"
#include "wstress/sensitivity.hpp"
#include "wstress/stress_solvers.hpp"

namespace py = pybind11;
using namespace wstress;

namespace {

std::vector<RmConstraint> to_constraints(const std::vector<std::pair<DistortionWeight, double>>& cs) {
  std::vector<RmConstraint> out;
  for (const auto& [g, r] : cs) out.push_back({g, r});
  return out;
}

SolverOptions options(double tol, double zeta, int max_iter) {
  SolverOptions o;
  o.tol = tol;
  o.zeta = zeta;
  o.max_iter = max_iter;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wasserstein reverse stress testing";

  static py::exception<NoSolution> no_solution(m, "NoSolution", PyExc_RuntimeError);
  static py::exception<NotConverged> not_converged(m, "NotConverged", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NoSolution& e) {
      py::set_error(no_solution, e.what());
    } catch (const NotConverged& e) {
      py::set_error(not_converged, e.what());
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<Lognormal>(m, "Lognormal").def(py::init<double, double>(), py::arg("mu"), py::arg("sigma"));
  py::class_<Normal>(m, "Normal").def(py::init<double, double>(), py::arg("mu"), py::arg("sigma"));
  py::class_<Gamma>(m, "Gamma")
      .def(py::init<double, double, double>(), py::arg("shape"), py::arg("rate"), py::arg("shift") = 0.0);
  py::class_<Empirical>(m, "Empirical").def(py::init<std::vector<double>>(), py::arg("samples"));

  py::class_<QuantileGrid>(m, "QuantileGrid")
      .def(py::init<std::vector<double>>(), py::arg("q"))
      .def_property_readonly("q", &QuantileGrid::q)
      .def_property_readonly("u", &QuantileGrid::abscissae)
      .def("__len__", &QuantileGrid::size);

  m.def("discretize", &discretize, py::arg("spec"), py::arg("n") = kDefaultGridSize);
  m.def("quantile", &quantile, py::arg("spec"), py::arg("p"));
  m.def("wasserstein2", &wasserstein2);

  py::class_<DistortionWeight>(m, "DistortionWeight")
      .def_readonly("gamma", &DistortionWeight::gamma)
      .def("label", &DistortionWeight::label)
      .def("nondecreasing", &DistortionWeight::nondecreasing);
  m.def("make_es", &make_es, py::arg("alpha"), py::arg("n"));
  m.def("make_alpha_beta", &make_alpha_beta, py::arg("alpha"), py::arg("beta"), py::arg("p"), py::arg("n"));
  m.def("make_rvar", &make_rvar, py::arg("alpha"), py::arg("beta"), py::arg("n"));
  m.def("eval_rm", py::overload_cast<const QuantileGrid&, const DistortionWeight&>(&eval_rm));
  m.def("var", &var);
  m.def("var_plus", &var_plus);
  m.def("mean_sd", [](const QuantileGrid& g) {
    const auto r = mean_sd(g);
    return py::make_tuple(r.mean, r.sd);
  });

  py::class_<Utility>(m, "Utility")
      .def_static("hara", &Utility::hara, py::arg("a"), py::arg("b"), py::arg("eta"))
      .def_static("linear", &Utility::linear)
      .def("__call__", &Utility::value)
      .def("derivative", &Utility::derivative);
  m.def("expected_utility", py::overload_cast<const QuantileGrid&, const Utility&>(&expected_utility));

  m.def("pav", [](const std::vector<double>& v, std::optional<std::vector<double>> w) {
    return pav(v, w ? *w : std::vector<double>(v.size(), 1.0));
  }, py::arg("values"), py::arg("weights") = py::none());
  m.def("spav", [](const std::vector<double>& v, double zeta, std::optional<std::vector<double>> w) {
    return spav(v, w ? *w : std::vector<double>(v.size(), 1.0), zeta);
  }, py::arg("values"), py::arg("zeta"), py::arg("weights") = py::none());

  py::class_<ConstraintReport>(m, "ConstraintReport")
      .def_readonly("label", &ConstraintReport::label)
      .def_readonly("relation", &ConstraintReport::relation)
      .def_readonly("target", &ConstraintReport::target)
      .def_readonly("achieved", &ConstraintReport::achieved)
      .def_readonly("residual", &ConstraintReport::residual)
      .def_readonly("satisfied", &ConstraintReport::satisfied);

  py::class_<StressedModel>(m, "StressedModel")
      .def_readonly("baseline", &StressedModel::baseline)
      .def_readonly("stressed", &StressedModel::stressed)
      .def_readonly("multiplier_names", &StressedModel::multiplier_names)
      .def_readonly("multipliers", &StressedModel::multipliers)
      .def_readonly("constraints", &StressedModel::constraints)
      .def_readonly("w2", &StressedModel::w2)
      .def_readonly("zeta", &StressedModel::zeta)
      .def_readonly("converged", &StressedModel::converged)
      .def_readonly("method", &StressedModel::method)
      .def_readonly("notes", &StressedModel::notes)
      .def("max_abs_residual", &StressedModel::max_abs_residual);

  m.def("solve_rm", [](const QuantileGrid& f, const std::vector<std::pair<DistortionWeight, double>>& cs, double zeta,
                       double tol, int max_iter) {
    return solve_rm(f, RmStress{to_constraints(cs)}, options(tol, zeta, max_iter));
  }, py::arg("baseline"), py::arg("constraints"), py::arg("zeta") = 0.0, py::arg("tol") = 1e-6,
        py::arg("max_iter") = 200);
  m.def("solve_coherent", [](const QuantileGrid& f, const DistortionWeight& g, double r) {
    return solve_coherent(f, g, r);
  }, py::arg("baseline"), py::arg("gamma"), py::arg("target"));
  m.def("solve_mean_var_rm", [](const QuantileGrid& f, double mean, double sd,
                                const std::vector<std::pair<DistortionWeight, double>>& cs, double zeta, double tol) {
    return solve_mean_var_rm(f, MeanVarRm{mean, sd, to_constraints(cs)}, options(tol, zeta, 200));
  }, py::arg("baseline"), py::arg("mean"), py::arg("sd"), py::arg("constraints") = std::vector<std::pair<DistortionWeight, double>>{},
        py::arg("zeta") = 0.0, py::arg("tol") = 1e-6);
  m.def("solve_var", [](const QuantileGrid& f, double alpha, double q, const std::string& kind) {
    if (kind != "left" && kind != "right") throw InvalidArgument("kind must be 'left' or 'right'");
    return solve_var(f, VarStress{alpha, q, kind == "left" ? VarKind::Left : VarKind::Right});
  }, py::arg("baseline"), py::arg("alpha"), py::arg("q"), py::arg("kind") = "left");
  m.def("solve_utility_rm", [](const QuantileGrid& f, const Utility& u, double c,
                               const std::vector<std::pair<DistortionWeight, double>>& cs, double zeta, double tol) {
    return solve_utility_rm(f, UtilityRm{u, c, to_constraints(cs)}, options(tol, zeta, 200));
  }, py::arg("baseline"), py::arg("utility"), py::arg("c"),
        py::arg("constraints") = std::vector<std::pair<DistortionWeight, double>>{}, py::arg("zeta") = 0.0,
        py::arg("tol") = 1e-6);
  m.def("solve_integral", [](const QuantileGrid& f, const std::vector<std::pair<std::vector<double>, double>>& linear,
                             const std::vector<std::pair<std::vector<double>, double>>& quadratic, double zeta) {
    IntegralStress s;
    for (const auto& [h, c] : linear) s.linear.push_back({h, c});
    for (const auto& [h, c] : quadratic) s.quadratic.push_back({h, c});
    return solve_integral(f, s, options(1e-6, zeta, 200));
  }, py::arg("baseline"), py::arg("linear") = std::vector<std::pair<std::vector<double>, double>>{},
        py::arg("quadratic") = std::vector<std::pair<std::vector<double>, double>>{}, py::arg("zeta") = 0.0);

  py::class_<WeightSet>(m, "WeightSet")
      .def(py::init([](std::vector<double> w) {
        WeightSet s;
        s.w = std::move(w);
        return s;
      }))
      .def_readonly("w", &WeightSet::w)
      .def_readonly("zero_count", &WeightSet::zero_count)
      .def_readonly("warning", &WeightSet::warning)
      .def_readonly("bin_width", &WeightSet::bin_width);
  m.def("rn_weights", [](const std::vector<double>& y, const BaselineSpec& spec, const QuantileGrid& g) {
    return rn_weights(y, spec, g);
  }, py::arg("y"), py::arg("baseline"), py::arg("stressed"));
  m.def("stressed_expectation", &stressed_expectation);

  m.def("reverse_sensitivity", [](const std::vector<double>& s, const WeightSet& w) {
    const auto r = reverse_sensitivity(s, w);
    py::dict d;
    d["S"] = r.S;
    d["numerator"] = r.numerator;
    d["max_bound"] = r.max_bound;
    d["min_bound"] = r.min_bound;
    return d;
  });
  m.def("delta_measure", [](const std::vector<double>& y, const std::vector<double>& x,
                            std::optional<std::vector<double>> w, std::size_t bins) {
    DeltaOptions o;
    o.bins = bins;
    return delta_measure(y, x, w ? *w : std::vector<double>{}, o);
  }, py::arg("y"), py::arg("x"), py::arg("weights") = py::none(), py::arg("bins") = 20);

  py::class_<SpatialConfig>(m, "SpatialConfig")
      .def(py::init<>())
      .def_readwrite("n_samples", &SpatialConfig::n_samples)
      .def_readwrite("seed", &SpatialConfig::seed)
      .def_readwrite("locations", &SpatialConfig::locations)
      .def_readwrite("theta_values", &SpatialConfig::theta_values)
      .def_readwrite("theta_probs", &SpatialConfig::theta_probs);
  m.def("generate", [](const SpatialConfig& c) {
    auto out = generate(c);
    py::dict d;
    for (std::size_t j = 0; j < out.samples.X.size(); ++j) d[py::str(out.samples.names[j])] = out.samples.X[j];
    d["Y"] = out.samples.Y;
    d["theta"] = out.theta;
    return d;
  }, py::arg("config"));
}
