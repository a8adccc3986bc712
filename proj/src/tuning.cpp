#include "panda/tuning.hpp"

#include <algorithm>
#include <cmath>

#include "panda/evaluation.hpp"

namespace panda {

std::string to_string(Method method) {
  switch (method) {
    case Method::PANDA: return "panda";
    case Method::LPD: return "lpd";
    case Method::AdaLDA: return "adalda";
    case Method::Bayes: return "bayes";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "panda") return Method::PANDA;
  if (name == "lpd") return Method::LPD;
  if (name == "adalda") return Method::AdaLDA;
  if (name == "bayes") return Method::Bayes;
  throw InvalidInput("unknown method name: " + name);
}

TuneGrid TuneGrid::standard() {
  TuneGrid grid;
  grid.lambda_tilde_values.reserve(80);
  for (int i = 1; i <= 80; ++i) {
    grid.lambda_tilde_values.push_back(0.1 * i);
  }
  return grid;
}

void TuneGrid::validate() const {
  auto ascending_positive = [](const std::vector<double>& values) {
    if (values.empty()) return false;
    double prev = 0.0;
    for (double value : values) {
      if (!(value > prev)) return false;
      prev = value;
    }
    return true;
  };
  if (!ascending_positive(lambda_tilde_values)) {
    throw InvalidInput("lambda_tilde grid must be positive and ascending");
  }
  if (!ascending_positive(c_values)) {
    throw InvalidInput("c grid must be positive and ascending");
  }
}

FitResult fit_method(Method method, const SuffStats& stats, double c,
                     double lambda, const AdmmConfig& cfg,
                     const std::optional<AdmmState>& init) {
  switch (method) {
    case Method::PANDA: return panda_fit(stats, c, lambda, cfg, init);
    case Method::LPD: return lpd_fit(stats, lambda, cfg, init);
    case Method::AdaLDA: return adalda_fit(stats, lambda, cfg, init);
    case Method::Bayes:
      throw InvalidInput("the Bayes rule is not a fitted estimator");
  }
  throw InvalidInput("unknown method");
}

TuneResult grid_search(const SuffStats& train_stats, const Matrix& val0,
                       const Matrix& val1, Method method, const TuneGrid& grid,
                       const AdmmConfig& cfg, bool warm_start,
                       const GaussianModel* model) {
  grid.validate();
  if (val0.rows() < 1 || val1.rows() < 1) {
    throw InvalidInput("validation sets must be nonempty");
  }

  const double rate = train_stats.sqrt_log_p_over_n();
  const std::vector<double> c_values =
      method == Method::PANDA ? grid.c_values : std::vector<double>{0.0};

  TuneResult result;
  bool have_best = false;
  double best_error = std::numeric_limits<double>::infinity();
  std::string first_failure;
  int failures = 0, attempts = 0;

  for (double c : c_values) {
    std::optional<AdmmState> carry;
    for (double lambda_tilde : grid.lambda_tilde_values) {
      const double lambda = lambda_tilde * rate;
      ++attempts;
      FitResult fit;
      try {
        fit = fit_method(method, train_stats, c, lambda, cfg,
                         warm_start ? carry : std::nullopt);
      } catch (const std::exception& e) {
        ++failures;
        if (first_failure.empty()) {
          first_failure = "lambda_tilde=" + std::to_string(lambda_tilde) +
                          ": " + e.what();
        }
        carry.reset();
        continue;
      }
      if (warm_start) carry = fit.solver_diag.final_state;

      const double val_error = empirical_error(fit.rule, val0, val1);
      TuneCurvePoint point{c, lambda_tilde, val_error, std::nullopt};
      if (model != nullptr) {
        point.pop_risk = fit.beta_hat.isZero(0.0)
                             ? 0.5
                             : population_risk(fit.rule, *model);
      }
      result.curve.push_back(point);

      const bool better =
          !have_best || val_error < best_error ||
          (val_error == best_error &&
           (lambda_tilde < result.best_lambda_tilde ||
            (lambda_tilde == result.best_lambda_tilde && c < result.best_c)));
      if (better) {
        have_best = true;
        best_error = val_error;
        result.best_lambda_tilde = lambda_tilde;
        result.best_c = c;
        result.best_fit = std::move(fit);
      }
    }
  }

  if (!have_best) {
    throw EstimatorInfeasible("all " + std::to_string(attempts) +
                              " grid fits failed; first: " + first_failure);
  }
  return result;
}

}  // namespace panda
