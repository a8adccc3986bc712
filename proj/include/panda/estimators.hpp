#pragma once

#include <optional>
#include <vector>

#include "panda/model.hpp"
#include "panda/solver.hpp"

namespace panda {

//! Output of a binary discriminant fit. The rule's intercept point is always
//! the sample midpoint mu_hat_m.
struct FitResult {
  Vector beta_hat;
  std::optional<double> tau_hat;     // PANDA only
  std::optional<double> delta_hat;   // AdaLDA stage-1 estimate
  std::optional<Vector> stage1_beta; // AdaLDA stage-1 minimizer
  LinearRule rule;
  Solution solver_diag;              // final-stage solve diagnostics
  std::optional<bool> soc_active;    // PANDA: |sqrt(b'Sb) - tau| small
  double c_used = 0.0;
  double lambda_used = 0.0;
};

//! Output of the K-class fit: one direction per class k = 2..K against the
//! reference class 1.
struct KClassFit {
  std::vector<Vector> betas;  // K-1 directions
  std::vector<double> taus;   // K-1 signal estimates
  std::vector<Vector> mu_hats;
  Vector priors;              // K nonnegative weights summing to 1
};

//! The pivotal parameter choice c = 1 / (8 (||mu_hat_d||_inf +
//! 4 sigma_hat_max sqrt(log p / n))), lambda = 20 sqrt(log p / n), expressed
//! on the raw ingredients so the arithmetic is testable in isolation.
std::pair<double, double> theoretical_defaults(double mu_d_inf,
                                               double sigma_max,
                                               double sqrt_log_p_over_n);
std::pair<double, double> theoretical_defaults(const SuffStats& stats);

//! One-stage PANDA fit: minimize ||beta||_1 + c tau^2 subject to
//! ||Sigma_hat beta - mu_hat_d||_inf <= lambda sigma_hat_max (tau + 1) and
//! sqrt(beta' Sigma_hat beta) <= tau.
FitResult panda_fit(const SuffStats& stats, double c, double lambda,
                    const AdmmConfig& cfg,
                    const std::optional<AdmmState>& init = std::nullopt);

//! LPD baseline: minimize ||beta||_1 subject to
//! ||Sigma_hat beta - mu_hat_d||_inf <= lambda sigma_hat_max.
FitResult lpd_fit(const SuffStats& stats, double lambda, const AdmmConfig& cfg,
                  const std::optional<AdmmState>& init = std::nullopt);

//! Two-stage AdaLDA baseline: stage 1 estimates the signal size through a
//! program whose row bound grows with beta' mu_hat_d; stage 2 re-solves with
//! the plugged-in bound. Throws EstimatorInfeasible when stage 1 lands where
//! its own row bound is negative.
FitResult adalda_fit(const SuffStats& stats, double lambda,
                     const AdmmConfig& cfg,
                     const std::optional<AdmmState>& init = std::nullopt);

//! K-class PANDA: pooled covariance over all classes; one PANDA program per
//! class k >= 2 with mean difference mu_hat_k - mu_hat_1. Pass equal priors
//! by default.
KClassFit kclass_panda_fit(const std::vector<Matrix>& class_samples,
                           const std::vector<double>& c_list, double lambda,
                           const AdmmConfig& cfg,
                           const std::optional<Vector>& priors = std::nullopt);

//! argmax_k of D_k with D_1 = 0 and
//! D_k = (z - (mu_hat_1 + mu_hat_k)/2)' beta_k + log(pi_k / pi_1).
//! Ties break toward the smallest k. Labels are 1-based.
int kclass_classify(const KClassFit& fit, const Eigen::Ref<const Vector>& z);

}  // namespace panda
