#include "panda/model.hpp"

#include <cmath>
#include <utility>

namespace panda {

namespace {

void check_symmetric(const Matrix& sigma, double rel_tol) {
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > rel_tol * scale) {
    throw InvalidInput("covariance matrix is not symmetric");
  }
}

}  // namespace

GaussianModel::GaussianModel(Vector mu0, Vector mu1, Matrix sigma)
    : mu0_(std::move(mu0)), mu1_(std::move(mu1)), sigma_(std::move(sigma)) {
  validate_and_finalize(/*derive_direction=*/true);
}

GaussianModel GaussianModel::with_known_direction(Vector mu0, Vector mu1,
                                                  Matrix sigma,
                                                  Vector beta_star) {
  GaussianModel model;
  model.mu0_ = std::move(mu0);
  model.mu1_ = std::move(mu1);
  model.sigma_ = std::move(sigma);
  model.beta_star_ = std::move(beta_star);
  model.validate_and_finalize(/*derive_direction=*/false);
  return model;
}

void GaussianModel::validate_and_finalize(bool derive_direction) {
  const Eigen::Index dim = mu0_.size();
  if (mu1_.size() != dim || sigma_.rows() != dim || sigma_.cols() != dim ||
      dim < 1) {
    throw InvalidInput("model dimensions disagree");
  }
  check_symmetric(sigma_, 1e-12);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma_,
                                            Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  if (!(lambda_min > 0.0)) {
    throw IllConditioned("covariance matrix is not positive definite");
  }

  const Vector mu_diff = mu1_ - mu0_;
  if (derive_direction) {
    Eigen::LLT<Matrix> llt(sigma_);
    beta_star_ = llt.solve(mu_diff);
  } else if (beta_star_.size() != dim) {
    throw InvalidInput("supplied direction has wrong length");
  }

  const double ref = std::max(1e-300, mu_diff.norm());
  const double residual = (sigma_ * beta_star_ - mu_diff).norm();
  if (residual > 1e-8 * ref) {
    throw InvalidInput("direction does not solve Sigma beta = mu1 - mu0");
  }

  const double quad = beta_star_.dot(sigma_ * beta_star_);
  const double inner = beta_star_.dot(mu_diff);
  const double agree_ref = std::max({1e-300, quad, inner});
  if (std::abs(quad - inner) > 1e-8 * agree_ref) {
    throw IllConditioned("signal-noise ratio routes disagree");
  }
  delta_ = std::sqrt(std::max(0.0, quad));
}

double GaussianModel::bayes_risk() const { return std_normal_cdf(-delta_ / 2.0); }

SuffStats compute_suff_stats(const Eigen::Ref<const Matrix>& samples0,
                             const Eigen::Ref<const Matrix>& samples1) {
  if (samples0.cols() != samples1.cols()) {
    throw InvalidInput("class samples have different column counts");
  }
  if (samples0.rows() < 2 || samples1.rows() < 2) {
    throw InsufficientData("each class needs at least 2 samples");
  }

  SuffStats s;
  s.n0 = samples0.rows();
  s.n1 = samples1.rows();
  s.n = std::min(s.n0, s.n1);
  s.p = samples0.cols();

  s.mu_hat0 = samples0.colwise().mean();
  s.mu_hat1 = samples1.colwise().mean();
  s.mu_hat_d = s.mu_hat1 - s.mu_hat0;
  s.mu_hat_m = 0.5 * (s.mu_hat0 + s.mu_hat1);

  Matrix centered0 = samples0.rowwise() - s.mu_hat0.transpose();
  Matrix centered1 = samples1.rowwise() - s.mu_hat1.transpose();
  s.sigma_hat = (centered0.transpose() * centered0 +
                 centered1.transpose() * centered1) /
                static_cast<double>(s.n0 + s.n1);
  // Scatter products are symmetric up to rounding; make it exact.
  s.sigma_hat = 0.5 * (s.sigma_hat + s.sigma_hat.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(s.sigma_hat);
  Vector clamped = eig.eigenvalues().cwiseMax(0.0);
  s.sigma_hat_sqrt = eig.eigenvectors() *
                     clamped.cwiseSqrt().asDiagonal() *
                     eig.eigenvectors().transpose();
  s.sigma_hat_sqrt = 0.5 * (s.sigma_hat_sqrt + s.sigma_hat_sqrt.transpose()).eval();

  s.sigma_hat_max = std::sqrt(std::max(0.0, s.sigma_hat.diagonal().maxCoeff()));
  return s;
}

std::pair<Vector, double> bayes_direction(const GaussianModel& model) {
  Eigen::LLT<Matrix> llt(model.sigma());
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-12) {
    throw IllConditioned("covariance condition estimate exceeds 1e12");
  }
  Vector beta = llt.solve(model.mu_d());
  const double delta = std::sqrt(std::max(0.0, beta.dot(model.sigma() * beta)));
  return {std::move(beta), delta};
}

int classify(const LinearRule& rule, const Eigen::Ref<const Vector>& z) {
  if (z.size() != rule.beta.size() || rule.alpha.size() != rule.beta.size()) {
    throw InvalidInput("rule/sample dimensions disagree");
  }
  return rule.beta.dot(z - rule.alpha) > 0.0 ? 1 : 0;
}

double population_risk(const LinearRule& rule, const GaussianModel& model) {
  if (rule.beta.size() != model.p() || rule.alpha.size() != model.p()) {
    throw InvalidInput("rule/model dimensions disagree");
  }
  if (rule.beta.isZero(0.0)) {
    throw DegenerateRule("risk is undefined for beta = 0");
  }
  const double spread = std::sqrt(rule.beta.dot(model.sigma() * rule.beta));
  const double margin0 = rule.beta.dot(rule.alpha - model.mu0());
  const double margin1 = rule.beta.dot(model.mu1() - rule.alpha);
  return 0.5 * std_normal_cdf(-margin0 / spread) +
         0.5 * std_normal_cdf(-margin1 / spread);
}

double std_normal_cdf(double x) {
  // erfc keeps full relative accuracy in the tails.
  return 0.5 * std::erfc(-x * 0.7071067811865475244008443621048490);
}

}  // namespace panda
