#pragma once

#include <Eigen/Dense>

#include "panda/errors.hpp"

namespace panda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

//! Two-class Gaussian population: class means, shared covariance, and the
//! derived optimal discriminant direction beta* = Sigma^{-1} (mu1 - mu0)
//! with signal-noise ratio delta = sqrt(beta*' Sigma beta*).
class GaussianModel {
 public:
  //! Validates symmetry and positive definiteness, then derives beta*/delta
  //! by a symmetric positive-definite solve.
  GaussianModel(Vector mu0, Vector mu1, Matrix sigma);

  //! Same validation, but adopts a caller-supplied direction whose exact
  //! support is meaningful (synthetic models build Sigma and beta* first and
  //! place the means so that mu1 - mu0 = Sigma beta*). The supplied direction
  //! must satisfy Sigma beta = mu1 - mu0 up to a small residual.
  static GaussianModel with_known_direction(Vector mu0, Vector mu1,
                                            Matrix sigma, Vector beta_star);

  Eigen::Index p() const { return mu0_.size(); }
  const Vector& mu0() const { return mu0_; }
  const Vector& mu1() const { return mu1_; }
  const Matrix& sigma() const { return sigma_; }
  Vector mu_d() const { return mu1_ - mu0_; }
  Vector mu_m() const { return 0.5 * (mu0_ + mu1_); }
  const Vector& beta_star() const { return beta_star_; }
  double delta() const { return delta_; }

  //! Bayes misclassification rate Phi(-delta/2).
  double bayes_risk() const;

 private:
  GaussianModel() = default;
  void validate_and_finalize(bool derive_direction);

  Vector mu0_, mu1_;
  Matrix sigma_;
  Vector beta_star_;
  double delta_ = 0.0;
};

//! Sample-level sufficient statistics for the two-class problem.
//!
//! The pooled covariance uses divisor n0 + n1. sigma_hat_sqrt is the
//! symmetric PSD square root (eigenvalues clamped at zero, since the pooled
//! covariance is singular whenever p exceeds the sample count). n is
//! min(n0, n1), the value entering every sqrt(log p / n) rate.
struct SuffStats {
  Vector mu_hat0;
  Vector mu_hat1;
  Vector mu_hat_d;
  Vector mu_hat_m;
  Matrix sigma_hat;
  Matrix sigma_hat_sqrt;
  double sigma_hat_max = 0.0;
  Eigen::Index n0 = 0;
  Eigen::Index n1 = 0;
  Eigen::Index n = 0;
  Eigen::Index p = 0;

  double sqrt_log_p_over_n() const {
    return std::sqrt(std::log(static_cast<double>(p)) /
                     static_cast<double>(n));
  }
};

//! A linear classification rule: predict class 1 iff beta' (z - alpha) > 0.
struct LinearRule {
  Vector alpha;
  Vector beta;
};

//! Sample means, pooled covariance (divisor n0 + n1), its symmetric square
//! root, and sigma_hat_max = sqrt(max_j Sigma_hat_jj). Rows are observations.
SuffStats compute_suff_stats(const Eigen::Ref<const Matrix>& samples0,
                             const Eigen::Ref<const Matrix>& samples1);

//! Optimal direction and signal-noise ratio of a Gaussian model, computed by
//! a fresh SPD solve (no explicit inverse). Throws IllConditioned when the
//! covariance's condition estimate exceeds 1e12.
std::pair<Vector, double> bayes_direction(const GaussianModel& model);

//! Predicted label of z under a linear rule: 1 iff beta'(z - alpha) > 0.
//! The inequality is strict, so boundary points get label 0.
int classify(const LinearRule& rule, const Eigen::Ref<const Vector>& z);

//! Closed-form misclassification rate of a linear rule under the model, with
//! equal class priors. Throws DegenerateRule when beta = 0.
double population_risk(const LinearRule& rule, const GaussianModel& model);

//! Standard normal CDF. Absolute error well below 1e-10.
double std_normal_cdf(double x);

}  // namespace panda
