#pragma once

#include <Eigen/Dense>

#include "panda/model.hpp"
#include "panda/rng.hpp"
#include "panda/solver.hpp"

namespace panda::testing {

//! Statistics object assembled directly from population-style ingredients,
//! for exercising the solvers on hand-picked instances.
inline SuffStats make_stats(Matrix sigma, Vector mu_d, Eigen::Index n = 50) {
  SuffStats stats;
  stats.p = sigma.rows();
  stats.n0 = stats.n1 = stats.n = n;
  stats.sigma_hat = std::move(sigma);
  stats.sigma_hat_sqrt = sym_sqrt(stats.sigma_hat);
  stats.sigma_hat_max =
      std::sqrt(std::max(0.0, stats.sigma_hat.diagonal().maxCoeff()));
  stats.mu_hat_d = std::move(mu_d);
  stats.mu_hat0 = Vector::Zero(stats.p);
  stats.mu_hat1 = stats.mu_hat_d;
  stats.mu_hat_m = 0.5 * stats.mu_hat_d;
  return stats;
}

inline Matrix random_spd(int p, Rng& rng, double eig_lo = 0.5,
                         double eig_hi = 2.0) {
  Matrix gauss(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) gauss(i, j) = rng.normal();
  }
  const Matrix q = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
  Vector eigenvalues(p);
  for (int i = 0; i < p; ++i) eigenvalues(i) = rng.uniform(eig_lo, eig_hi);
  Matrix spd = q * eigenvalues.asDiagonal() * q.transpose();
  return 0.5 * (spd + spd.transpose());
}

inline Vector random_vector(int p, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Vector v(p);
  for (int i = 0; i < p; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

}  // namespace panda::testing
