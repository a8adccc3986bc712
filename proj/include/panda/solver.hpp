#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "panda/errors.hpp"
#include "panda/model.hpp"

namespace panda {

//! A conic program in the split form used by the solver:
//!
//!   minimize    ||beta||_1 + c tau^2
//!   subject to  A_top beta - tau_coef tau 1 + u = b_top,   u >= 0
//!               A_bot beta + tau_coef tau 1 - v = b_bot,   v >= 0
//!               w - soc_mat beta = 0,                      ||w||_2 <= tau
//!
//! PANDA instantiates all three row blocks with A_top = A_bot = Sigma_hat,
//! tau_coef = lambda sigma_hat_max and soc_mat = Sigma_hat^{1/2}. The pure-LP
//! programs (LPD and both AdaLDA stages) drop the cone block and the tau
//! column entirely (has_soc_block = false, tau fixed at 0, c_penalty = 0).
struct ConicProgram {
  Matrix a_top;    // p x p, beta coefficients of the upper slack rows
  Matrix a_bot;    // p x p, beta coefficients of the lower slack rows
  Matrix soc_mat;  // p x p when has_soc_block, otherwise empty
  Vector b_top;
  Vector b_bot;
  double tau_coef = 0.0;
  double c_penalty = 0.0;
  double lambda = 0.0;
  bool has_soc_block = false;
  // The upper and lower beta blocks share values (PANDA/LPD); lets the solver
  // fuse their matrix products.
  bool same_beta_block = true;

  Eigen::Index p() const { return a_top.rows(); }
  Eigen::Index rows() const { return has_soc_block ? 3 * p() : 2 * p(); }
};

//! Solver parameters. eta <= 0 (the default) selects automatic per-block
//! primal step sizes, 0.9 / (rho * lambda_max(A_z'A_z)) for each variable
//! block z, with the beta block's lambda_max estimated by power iteration
//! and the tau step also accounting for the 2c objective curvature. A
//! positive eta is used verbatim for every block.
struct AdmmConfig {
  double rho = 1.0;
  double eta = 0.0;
  int max_iters = 20000;
  double primal_tol = 1e-6;
  double change_tol = 1e-8;
  int trace_stride = 0;  // 0 disables the per-iteration trace
};

//! Resolved gradient step sizes per variable block.
struct StepSizes {
  double beta = 0.0;
  double slack = 0.0;  // u, v and w share unit-norm constraint columns
  double tau = 0.0;
};

//! Solver iterate. After every step u, v are componentwise nonnegative and
//! (w, tau) lies in the second-order cone.
struct AdmmState {
  Vector beta;
  Vector u;
  Vector v;
  Vector w;      // empty when the program has no cone block
  double tau = 0.0;
  Vector s;      // scaled dual, one entry per constraint row

  static AdmmState zero(const ConicProgram& program);
};

struct TracePoint {
  int iteration;
  double primal_residual;
  double objective;
};

enum class SolveStatus { converged, max_iters, diverged };

struct Solution {
  Vector beta_hat;
  double tau_hat = 0.0;
  double objective = 0.0;
  double primal_residual = 0.0;  // relative: ||Ax-b|| / (1 + ||b||)
  int iterations = 0;
  SolveStatus status = SolveStatus::max_iters;
  StepSizes steps_used;
  AdmmState final_state;         // warm-start handle for path sweeps
  std::vector<TracePoint> trace;
};

std::string to_string(SolveStatus status);

//! Componentwise projection onto the nonnegative orthant.
Vector project_nonneg(const Eigen::Ref<const Vector>& x);

//! Euclidean projection onto the second-order cone {(x, t): ||x||_2 <= t}.
std::pair<Vector, double> project_soc(const Eigen::Ref<const Vector>& x,
                                      double t);

//! Soft-thresholding: the proximal operator of threshold * ||.||_1.
Vector prox_l1(const Eigen::Ref<const Vector>& x, double threshold);

//! Symmetric PSD square root by eigendecomposition, negative eigenvalues
//! clamped to zero. Throws InvalidInput if m is asymmetric beyond 1e-10.
Matrix sym_sqrt(const Eigen::Ref<const Matrix>& m);

//! The PANDA program for given statistics and tuning parameters (c > 0,
//! lambda >= 0).
ConicProgram assemble_panda_program(const SuffStats& stats, double c,
                                    double lambda);

//! Box-constrained l1 program: min ||beta||_1 s.t. ||Sigma_hat beta -
//! mu_hat_d||_inf <= rhs. Covers LPD (rhs = lambda sigma_hat_max) and the
//! second AdaLDA stage.
ConicProgram assemble_box_program(const SuffStats& stats, double rhs);

//! First AdaLDA stage: the row bound grows linearly in beta' mu_hat_d, which
//! folds into the beta coefficients of the slack rows.
ConicProgram assemble_adalda_stage1_program(const SuffStats& stats,
                                            double lambda);

//! Equality residual A x - b of an iterate (dual term excluded).
Vector program_residual(const ConicProgram& program, const AdmmState& state);

//! Worst violation of the program's original constraints at (beta, tau):
//! the largest positive excess over the row bounds and the cone bound.
double original_violation(const ConicProgram& program,
                          const Eigen::Ref<const Vector>& beta, double tau);

//! One pass of the proximal ADMM update over (beta, u, v, w, tau, s):
//! a proximal-gradient step on beta (gradient on the smooth augmented term,
//! then soft-threshold at the beta step size), projected gradient steps on
//! the slacks and the cone pair, and the scaled dual update.
AdmmState admm_step(const AdmmState& state, const ConicProgram& program,
                    const AdmmConfig& config);

//! Step sizes the solver will use for a program under a configuration.
StepSizes resolve_step_sizes(const ConicProgram& program,
                             const AdmmConfig& config);

//! Run the ADMM iteration until both the relative primal residual and the
//! relative iterate change fall below their tolerances, or max_iters is hit.
//! Returns the best-feasibility iterate seen. Non-finite iterates stop the
//! run with status diverged and the last finite iterate.
Solution solve(const ConicProgram& program, const AdmmConfig& config,
               const std::optional<AdmmState>& init = std::nullopt);

}  // namespace panda
