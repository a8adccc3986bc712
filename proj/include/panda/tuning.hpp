#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "panda/estimators.hpp"
#include "panda/model.hpp"

namespace panda {

enum class Method { PANDA, LPD, AdaLDA, Bayes };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

//! Search grid for the dimensionless tuning factor lambda_tilde (the fitted
//! lambda is lambda_tilde * sqrt(log p / n)) and, for PANDA, the candidate
//! penalty values c.
struct TuneGrid {
  std::vector<double> lambda_tilde_values;
  std::vector<double> c_values{20.0};

  //! 0.1, 0.2, ..., 8.0 and the single penalty c = 20.
  static TuneGrid standard();
  void validate() const;
};

struct TuneCurvePoint {
  double c;
  double lambda_tilde;
  double val_error;
  std::optional<double> pop_risk;
};

struct TuneResult {
  double best_lambda_tilde = 0.0;
  double best_c = 0.0;
  FitResult best_fit;
  std::vector<TuneCurvePoint> curve;
};

//! Validation-set grid search: fit on the training statistics at every grid
//! point, score by misclassification on the held-out samples, keep the
//! minimizer. Ties break toward the smaller lambda_tilde, then the smaller
//! c. Small-to-large lambda_tilde sweeps reuse the previous solver state as
//! a warm start unless warm_start is false. The optional model adds the
//! closed-form risk of each grid point to the curve (reporting only; the
//! selection never sees it).
TuneResult grid_search(const SuffStats& train_stats, const Matrix& val0,
                       const Matrix& val1, Method method, const TuneGrid& grid,
                       const AdmmConfig& cfg, bool warm_start = true,
                       const GaussianModel* model = nullptr);

//! One estimator fit at explicit parameters (c is ignored by LPD/AdaLDA).
FitResult fit_method(Method method, const SuffStats& stats, double c,
                     double lambda, const AdmmConfig& cfg,
                     const std::optional<AdmmState>& init = std::nullopt);

}  // namespace panda
