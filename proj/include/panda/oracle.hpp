#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panda/model.hpp"
#include "panda/rng.hpp"
#include "panda/solver.hpp"

namespace panda {

//! Brute-force reference solutions for the small conic programs (p <= 3),
//! computed by dense grid search with successive refinement over the
//! original feasible sets. Entirely independent of the iterative solver:
//! nothing here touches the ADMM machinery.

struct OracleResult {
  Vector beta;
  double tau = 0.0;       // minimal feasible tau for the cone programs
  double objective = 0.0;
  bool interior = true;   // argmin stayed away from the search boundary
};

//! min ||beta||_1 + c tau^2 over the PANDA feasible set. tau is eliminated
//! analytically (its optimal value given beta is the smallest feasible one),
//! leaving an unconstrained convex function of beta on a grid.
OracleResult oracle_panda(const SuffStats& stats, double c, double lambda);

//! min ||beta||_1 subject to ||Sigma_hat beta - mu_hat_d||_inf <= rhs,
//! scanned in the residual coordinates y = Sigma_hat beta - mu_hat_d where
//! the feasible set is exactly the box [-rhs, rhs]^p.
OracleResult oracle_box_lp(const SuffStats& stats, double rhs);

//! First AdaLDA stage in the same residual coordinates; the bound grows
//! linearly in y there, and y = 0 is always feasible.
OracleResult oracle_adalda_stage1(const SuffStats& stats, double lambda);

//! A random small instance for the solver-vs-oracle battery: a well-
//! conditioned random covariance, a bounded mean difference, and tuning
//! parameters in ranges that keep the optima inside the oracle search box.
struct OracleInstance {
  SuffStats stats;
  double c = 1.0;
  double lambda = 0.5;
};

OracleInstance random_oracle_instance(int p, Rng& rng);

struct OracleCheckRow {
  int p;
  int instance;
  std::string method;
  double solver_objective;
  double oracle_objective;
  double rel_gap;
  double violation;
};

struct OracleCheckReport {
  std::vector<OracleCheckRow> rows;
  double max_rel_gap = 0.0;
  double max_violation = 0.0;
  int instances = 0;

  bool pass(double gap_tol = 1e-2, double violation_tol = 1e-6) const {
    return instances == 0 ||
           (max_rel_gap <= gap_tol && max_violation <= violation_tol);
  }
};

//! Solve n_instances random instances at each p in {1, .., max_p} with all
//! three estimators and compare against the grid oracles. AdaLDA
//! contributes one row per stage; the second stage reuses the solver's
//! signal estimate on both sides so each solved program is checked against
//! its own reference.
OracleCheckReport run_oracle_battery(int n_instances, int max_p,
                                     std::uint64_t seed,
                                     const AdmmConfig& cfg);

}  // namespace panda
