#include "panda/estimators.hpp"

#include <cmath>

namespace panda {

namespace {

constexpr double kSocActivityTol = 1e-4;

LinearRule midpoint_rule(const SuffStats& stats, const Vector& beta) {
  return LinearRule{stats.mu_hat_m, beta};
}

}  // namespace

std::pair<double, double> theoretical_defaults(double mu_d_inf,
                                               double sigma_max,
                                               double sqrt_log_p_over_n) {
  const double c =
      1.0 / (8.0 * (mu_d_inf + 4.0 * sigma_max * sqrt_log_p_over_n));
  const double lambda = 20.0 * sqrt_log_p_over_n;
  return {c, lambda};
}

std::pair<double, double> theoretical_defaults(const SuffStats& stats) {
  return theoretical_defaults(stats.mu_hat_d.lpNorm<Eigen::Infinity>(),
                              stats.sigma_hat_max, stats.sqrt_log_p_over_n());
}

FitResult panda_fit(const SuffStats& stats, double c, double lambda,
                    const AdmmConfig& cfg,
                    const std::optional<AdmmState>& init) {
  ConicProgram prog = assemble_panda_program(stats, c, lambda);
  Solution sol = solve(prog, cfg, init);
  if (sol.status == SolveStatus::diverged) {
    throw SolverDiverged("PANDA solve diverged at iteration " +
                         std::to_string(sol.iterations));
  }

  FitResult fit;
  fit.beta_hat = sol.beta_hat;
  fit.tau_hat = sol.tau_hat;
  fit.rule = midpoint_rule(stats, sol.beta_hat);
  const double cone_gap = std::abs(
      std::sqrt(std::max(0.0, sol.beta_hat.dot(stats.sigma_hat * sol.beta_hat))) -
      sol.tau_hat);
  fit.soc_active = cone_gap <= kSocActivityTol * (1.0 + sol.tau_hat);
  fit.c_used = c;
  fit.lambda_used = lambda;
  fit.solver_diag = std::move(sol);
  return fit;
}

FitResult lpd_fit(const SuffStats& stats, double lambda, const AdmmConfig& cfg,
                  const std::optional<AdmmState>& init) {
  if (lambda < 0.0) throw InvalidInput("lambda must be nonnegative");
  ConicProgram prog =
      assemble_box_program(stats, lambda * stats.sigma_hat_max);
  Solution sol = solve(prog, cfg, init);
  if (sol.status == SolveStatus::diverged) {
    throw SolverDiverged("LPD solve diverged at iteration " +
                         std::to_string(sol.iterations));
  }

  FitResult fit;
  fit.beta_hat = sol.beta_hat;
  fit.rule = midpoint_rule(stats, sol.beta_hat);
  fit.lambda_used = lambda;
  fit.solver_diag = std::move(sol);
  return fit;
}

FitResult adalda_fit(const SuffStats& stats, double lambda,
                     const AdmmConfig& cfg,
                     const std::optional<AdmmState>& init) {
  if (lambda < 0.0) throw InvalidInput("lambda must be nonnegative");
  const double gamma = 4.0 * stats.sigma_hat_max * stats.sqrt_log_p_over_n();

  ConicProgram stage1 = assemble_adalda_stage1_program(stats, lambda);
  Solution sol1 = solve(stage1, cfg, init);
  if (sol1.status == SolveStatus::diverged) {
    throw SolverDiverged("AdaLDA stage 1 diverged");
  }
  const double inner = sol1.beta_hat.dot(stats.mu_hat_d);
  if (gamma * (lambda * inner + 1.0) < 0.0) {
    throw EstimatorInfeasible(
        "AdaLDA stage 1 landed where its row bound is negative (beta'mu_d = " +
        std::to_string(inner) + ")");
  }
  const double delta_hat = std::sqrt(std::abs(inner));

  const double rhs = gamma * std::sqrt(lambda * delta_hat * delta_hat + 1.0);
  ConicProgram stage2 = assemble_box_program(stats, rhs);
  Solution sol2 = solve(stage2, cfg);
  if (sol2.status == SolveStatus::diverged) {
    throw SolverDiverged("AdaLDA stage 2 diverged");
  }

  FitResult fit;
  fit.beta_hat = sol2.beta_hat;
  fit.delta_hat = delta_hat;
  fit.stage1_beta = std::move(sol1.beta_hat);
  fit.rule = midpoint_rule(stats, sol2.beta_hat);
  fit.lambda_used = lambda;
  fit.solver_diag = std::move(sol2);
  return fit;
}

KClassFit kclass_panda_fit(const std::vector<Matrix>& class_samples,
                           const std::vector<double>& c_list, double lambda,
                           const AdmmConfig& cfg,
                           const std::optional<Vector>& priors) {
  const std::size_t num_classes = class_samples.size();
  if (num_classes < 2) throw InvalidInput("need at least 2 classes");
  if (c_list.size() != num_classes - 1) {
    throw InvalidInput("need one c per class beyond the reference class");
  }
  const Eigen::Index p = class_samples.front().cols();

  Eigen::Index total = 0;
  std::vector<Vector> means(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    const Matrix& samples = class_samples[k];
    if (samples.cols() != p) throw InvalidInput("class column counts differ");
    if (samples.rows() < 2) {
      throw InsufficientData("each class needs at least 2 samples");
    }
    total += samples.rows();
    means[k] = samples.colwise().mean();
  }

  Matrix pooled = Matrix::Zero(p, p);
  Eigen::Index n_min = class_samples.front().rows();
  for (std::size_t k = 0; k < num_classes; ++k) {
    Matrix centered =
        class_samples[k].rowwise() - means[k].transpose();
    pooled.noalias() += centered.transpose() * centered;
    n_min = std::min(n_min, class_samples[k].rows());
  }
  pooled /= static_cast<double>(total);
  pooled = 0.5 * (pooled + pooled.transpose()).eval();

  // Reuse the binary machinery with class 1 as reference.
  SuffStats stats;
  stats.sigma_hat = pooled;
  stats.sigma_hat_sqrt = sym_sqrt(pooled);
  stats.sigma_hat_max = std::sqrt(std::max(0.0, pooled.diagonal().maxCoeff()));
  stats.p = p;
  stats.n = n_min;
  stats.n0 = stats.n1 = n_min;
  stats.mu_hat0 = means.front();

  KClassFit fit;
  fit.mu_hats = means;
  if (priors) {
    if (priors->size() != static_cast<Eigen::Index>(num_classes) ||
        priors->minCoeff() < 0.0 ||
        std::abs(priors->sum() - 1.0) > 1e-12) {
      throw InvalidInput("priors must be nonnegative and sum to 1");
    }
    fit.priors = *priors;
  } else {
    fit.priors = Vector::Constant(num_classes,
                                  1.0 / static_cast<double>(num_classes));
  }

  for (std::size_t k = 1; k < num_classes; ++k) {
    stats.mu_hat1 = means[k];
    stats.mu_hat_d = means[k] - means.front();
    stats.mu_hat_m = 0.5 * (means[k] + means.front());
    FitResult sub = panda_fit(stats, c_list[k - 1], lambda, cfg);
    fit.betas.push_back(std::move(sub.beta_hat));
    fit.taus.push_back(*sub.tau_hat);
  }
  return fit;
}

int kclass_classify(const KClassFit& fit, const Eigen::Ref<const Vector>& z) {
  const std::size_t num_classes = fit.mu_hats.size();
  if (z.size() != fit.mu_hats.front().size()) {
    throw InvalidInput("sample dimension does not match the fit");
  }
  int best_label = 1;
  double best_score = 0.0;  // D_1 = 0 for the reference class
  for (std::size_t k = 1; k < num_classes; ++k) {
    const Vector midpoint = 0.5 * (fit.mu_hats.front() + fit.mu_hats[k]);
    const double score = fit.betas[k - 1].dot(z - midpoint) +
                         std::log(fit.priors(k) / fit.priors(0));
    if (score > best_score) {
      best_score = score;
      best_label = static_cast<int>(k) + 1;
    }
  }
  return best_label;
}

}  // namespace panda
