#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "panda/datagen.hpp"
#include "panda/estimators.hpp"
#include "panda/evaluation.hpp"
#include "panda/model.hpp"
#include "panda/oracle.hpp"
#include "panda/solver.hpp"
#include "panda/tuning.hpp"

namespace py = pybind11;
using namespace panda;

namespace {

py::dict fit_to_dict(const FitResult& fit) {
  py::dict out;
  out["beta_hat"] = fit.beta_hat;
  if (fit.tau_hat) out["tau_hat"] = *fit.tau_hat;
  if (fit.delta_hat) out["delta_hat"] = *fit.delta_hat;
  if (fit.soc_active) out["soc_active"] = *fit.soc_active;
  out["alpha"] = fit.rule.alpha;
  out["objective"] = fit.solver_diag.objective;
  out["iterations"] = fit.solver_diag.iterations;
  out["status"] = to_string(fit.solver_diag.status);
  out["primal_residual"] = fit.solver_diag.primal_residual;
  return out;
}

SuffStats stats_from(const Matrix& samples0, const Matrix& samples1) {
  return compute_suff_stats(samples0, samples1);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Pivotal high-dimensional linear discriminant analysis: PANDA, the "
      "LPD/AdaLDA baselines, a proximal-ADMM conic solver, synthetic models, "
      "and evaluation metrics.";

  py::class_<AdmmConfig>(m, "AdmmConfig")
      .def(py::init<>())
      .def_readwrite("rho", &AdmmConfig::rho)
      .def_readwrite("eta", &AdmmConfig::eta)
      .def_readwrite("max_iters", &AdmmConfig::max_iters)
      .def_readwrite("primal_tol", &AdmmConfig::primal_tol)
      .def_readwrite("change_tol", &AdmmConfig::change_tol);

  py::class_<GaussianModel>(m, "GaussianModel")
      .def(py::init<Vector, Vector, Matrix>(), py::arg("mu0"), py::arg("mu1"),
           py::arg("sigma"))
      .def_property_readonly("mu0", &GaussianModel::mu0)
      .def_property_readonly("mu1", &GaussianModel::mu1)
      .def_property_readonly("sigma", &GaussianModel::sigma)
      .def_property_readonly("beta_star", &GaussianModel::beta_star)
      .def_property_readonly("delta", &GaussianModel::delta)
      .def("bayes_risk", &GaussianModel::bayes_risk);

  m.def("std_normal_cdf", &std_normal_cdf, py::arg("x"));

  m.def(
      "build_model",
      [](const std::string& model, int p, int s, double eta_scale,
         std::uint64_t seed) {
        return build_model(
            SimSpec{sim_model_from_string(model), p, s, eta_scale, seed});
      },
      py::arg("model"), py::arg("p"), py::arg("s") = 5,
      py::arg("eta_scale") = 1.0, py::arg("seed") = 0);

  m.def(
      "sample",
      [](const GaussianModel& model, Eigen::Index n0, Eigen::Index n1,
         std::uint64_t seed) { return sample(model, n0, n1, seed); },
      py::arg("model"), py::arg("n0"), py::arg("n1"), py::arg("seed") = 0);

  m.def(
      "theoretical_defaults",
      [](const Matrix& samples0, const Matrix& samples1) {
        return theoretical_defaults(stats_from(samples0, samples1));
      },
      py::arg("samples0"), py::arg("samples1"),
      "pivotal (c, lambda) from two sample matrices");

  m.def(
      "panda_fit",
      [](const Matrix& samples0, const Matrix& samples1, double c,
         double lambda, const AdmmConfig& cfg) {
        return fit_to_dict(panda_fit(stats_from(samples0, samples1), c,
                                     lambda, cfg));
      },
      py::arg("samples0"), py::arg("samples1"), py::arg("c"),
      py::arg("lambda_"), py::arg("config") = AdmmConfig{});

  m.def(
      "lpd_fit",
      [](const Matrix& samples0, const Matrix& samples1, double lambda,
         const AdmmConfig& cfg) {
        return fit_to_dict(lpd_fit(stats_from(samples0, samples1), lambda,
                                   cfg));
      },
      py::arg("samples0"), py::arg("samples1"), py::arg("lambda_"),
      py::arg("config") = AdmmConfig{});

  m.def(
      "adalda_fit",
      [](const Matrix& samples0, const Matrix& samples1, double lambda,
         const AdmmConfig& cfg) {
        return fit_to_dict(adalda_fit(stats_from(samples0, samples1), lambda,
                                      cfg));
      },
      py::arg("samples0"), py::arg("samples1"), py::arg("lambda_"),
      py::arg("config") = AdmmConfig{});

  m.def(
      "classify",
      [](const Vector& alpha, const Vector& beta, const Vector& z) {
        return classify(LinearRule{alpha, beta}, z);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("z"));

  m.def(
      "population_risk",
      [](const Vector& alpha, const Vector& beta, const GaussianModel& model) {
        return population_risk(LinearRule{alpha, beta}, model);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("model"));

  m.def(
      "empirical_error",
      [](const Vector& alpha, const Vector& beta, const Matrix& test0,
         const Matrix& test1) {
        return empirical_error(LinearRule{alpha, beta}, test0, test1);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("test0"), py::arg("test1"));

  m.def(
      "auc",
      [](const Vector& alpha, const Vector& beta, const Matrix& test0,
         const Matrix& test1) {
        return auc(LinearRule{alpha, beta}, test0, test1);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("test0"), py::arg("test1"));

  m.def(
      "variable_selection",
      [](const Vector& beta_hat, const Vector& beta_star, double threshold) {
        const SelectionCounts counts =
            variable_selection(beta_hat, beta_star, threshold);
        py::dict out;
        out["tp"] = counts.tp;
        out["tn"] = counts.tn;
        out["precision"] = counts.precision;
        out["recall"] = counts.recall;
        return out;
      },
      py::arg("beta_hat"), py::arg("beta_star"), py::arg("threshold") = 0.01);

  m.def("prox_l1", &prox_l1, py::arg("x"), py::arg("threshold"));
  m.def("project_nonneg", &project_nonneg, py::arg("x"));
  m.def(
      "project_soc",
      [](const Vector& x, double t) { return project_soc(x, t); },
      py::arg("x"), py::arg("t"));
  m.def("sym_sqrt", &sym_sqrt, py::arg("m"));

  m.def(
      "grid_search",
      [](const Matrix& train0, const Matrix& train1, const Matrix& val0,
         const Matrix& val1, const std::string& method,
         const std::vector<double>& lambda_tildes, double c,
         const AdmmConfig& cfg) {
        TuneGrid grid;
        grid.lambda_tilde_values = lambda_tildes;
        grid.c_values = {c};
        TuneResult result =
            grid_search(stats_from(train0, train1), val0, val1,
                        method_from_string(method), grid, cfg);
        py::dict out = fit_to_dict(result.best_fit);
        out["best_lambda_tilde"] = result.best_lambda_tilde;
        out["best_c"] = result.best_c;
        py::list curve;
        for (const TuneCurvePoint& point : result.curve) {
          curve.append(py::make_tuple(point.lambda_tilde, point.val_error));
        }
        out["curve"] = curve;
        return out;
      },
      py::arg("train0"), py::arg("train1"), py::arg("val0"), py::arg("val1"),
      py::arg("method"), py::arg("lambda_tildes"), py::arg("c") = 20.0,
      py::arg("config") = AdmmConfig{});
}
