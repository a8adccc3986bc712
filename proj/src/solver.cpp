#include "panda/solver.hpp"

#include <cmath>
#include <limits>

namespace panda {

namespace {

//! Shared update engine. Keeps the block matrix products and the running
//! residual r = A x - b + s in sync across Gauss-Seidel sub-steps so each
//! iteration costs a handful of p x p products.
class Stepper {
 public:
  Stepper(const ConicProgram& program, double rho, StepSizes eta)
      : prog_(program),
        rho_(rho),
        eta_(eta),
        p_(program.p()),
        soc_(program.has_soc_block) {
    b_norm_ = std::sqrt(prog_.b_top.squaredNorm() + prog_.b_bot.squaredNorm());
  }

  void sync(const AdmmState& state) {
    top_beta_.noalias() = prog_.a_top * state.beta;
    if (prog_.same_beta_block) {
      bot_beta_ = top_beta_;
    } else {
      bot_beta_.noalias() = prog_.a_bot * state.beta;
    }
    r1_ = top_beta_ + state.u - prog_.b_top + state.s.head(p_);
    r2_ = bot_beta_ - state.v - prog_.b_bot + state.s.segment(p_, p_);
    if (soc_) {
      const double shift = prog_.tau_coef * state.tau;
      r1_.array() -= shift;
      r2_.array() += shift;
      soc_beta_.noalias() = prog_.soc_mat * state.beta;
      r3_ = state.w - soc_beta_ + state.s.tail(p_);
    }
  }

  //! One full pass: beta, u, v, (w, tau), dual. Returns the squared norm of
  //! the iterate change; primal_residual() is valid afterwards.
  double step(AdmmState& state) {
    double change_sq = 0.0;

    // beta: gradient on the smooth augmented term, then soft-threshold.
    if (prog_.same_beta_block) {
      grad_beta_.noalias() = prog_.a_top.transpose() * (r1_ + r2_);
    } else {
      grad_beta_.noalias() = prog_.a_top.transpose() * r1_;
      grad_beta_.noalias() += prog_.a_bot.transpose() * r2_;
    }
    if (soc_) grad_beta_.noalias() -= prog_.soc_mat.transpose() * r3_;
    new_beta_ = prox_l1(state.beta - (eta_.beta * rho_) * grad_beta_, eta_.beta);
    change_sq += (new_beta_ - state.beta).squaredNorm();
    state.beta.swap(new_beta_);

    top_beta_.noalias() = prog_.a_top * state.beta;
    r1_ += top_beta_ - old_block_;  // old_block_ holds the previous product
    // (set below on first use; see ctor of the loop in solve/sync order)
    if (prog_.same_beta_block) {
      r2_ += top_beta_ - old_block_bot_;
      bot_beta_ = top_beta_;
    } else {
      bot_beta_.noalias() = prog_.a_bot * state.beta;
      r2_ += bot_beta_ - old_block_bot_;
    }
    if (soc_) {
      new_soc_beta_.noalias() = prog_.soc_mat * state.beta;
      r3_ -= new_soc_beta_ - soc_beta_;
      soc_beta_.swap(new_soc_beta_);
    }

    // u and v: gradient step, then clamp to the nonnegative orthant.
    new_slack_ = (state.u - (eta_.slack * rho_) * r1_).cwiseMax(0.0);
    r1_ += new_slack_ - state.u;
    change_sq += (new_slack_ - state.u).squaredNorm();
    state.u.swap(new_slack_);

    new_slack_ = (state.v + (eta_.slack * rho_) * r2_).cwiseMax(0.0);
    r2_ -= new_slack_ - state.v;
    change_sq += (new_slack_ - state.v).squaredNorm();
    state.v.swap(new_slack_);

    if (soc_) {
      // Joint (w, tau) step from the same residual, then cone projection.
      const double grad_tau =
          2.0 * prog_.c_penalty * state.tau +
          rho_ * prog_.tau_coef * (r2_.sum() - r1_.sum());
      const double tau_tilde = state.tau - eta_.tau * grad_tau;
      new_slack_ = state.w - (eta_.slack * rho_) * r3_;
      auto [w_new, tau_new] = project_soc(new_slack_, tau_tilde);
      const double dtau = tau_new - state.tau;
      r1_.array() -= prog_.tau_coef * dtau;
      r2_.array() += prog_.tau_coef * dtau;
      r3_ += w_new - state.w;
      change_sq += (w_new - state.w).squaredNorm() + dtau * dtau;
      state.w = std::move(w_new);
      state.tau = tau_new;
    }

    // Scaled dual ascent: s <- s + (A x - b). The residual r already carries
    // the old dual, so A x - b = r - s.
    axb1_ = r1_ - state.s.head(p_);
    axb2_ = r2_ - state.s.segment(p_, p_);
    double res_sq = axb1_.squaredNorm() + axb2_.squaredNorm();
    state.s.head(p_) = r1_;
    state.s.segment(p_, p_) = r2_;
    r1_ += axb1_;
    r2_ += axb2_;
    if (soc_) {
      axb3_ = r3_ - state.s.tail(p_);
      res_sq += axb3_.squaredNorm();
      state.s.tail(p_) = r3_;
      r3_ += axb3_;
    }
    primal_residual_ = std::sqrt(res_sq);
    return change_sq;
  }

  //! Call immediately before step(): snapshots the beta products that the
  //! incremental residual update consumes.
  void snapshot_products() {
    old_block_ = top_beta_;
    old_block_bot_ = bot_beta_;
  }

  double primal_residual() const { return primal_residual_; }
  double relative_residual() const { return primal_residual_ / (1.0 + b_norm_); }
  double b_norm() const { return b_norm_; }

 private:
  const ConicProgram& prog_;
  double rho_;
  StepSizes eta_;
  Eigen::Index p_;
  bool soc_;
  double b_norm_ = 0.0;
  double primal_residual_ = std::numeric_limits<double>::infinity();

  Vector top_beta_, bot_beta_, soc_beta_;
  Vector r1_, r2_, r3_;
  Vector grad_beta_, new_beta_, new_soc_beta_, new_slack_;
  Vector old_block_, old_block_bot_;
  Vector axb1_, axb2_, axb3_;
};

double state_norm_sq(const AdmmState& state) {
  double total = state.beta.squaredNorm() + state.u.squaredNorm() +
                 state.v.squaredNorm() + state.tau * state.tau;
  if (state.w.size() > 0) total += state.w.squaredNorm();
  return total;
}

bool state_finite(const AdmmState& state) {
  return state.beta.allFinite() && state.u.allFinite() &&
         state.v.allFinite() && std::isfinite(state.tau) &&
         (state.w.size() == 0 || state.w.allFinite()) && state.s.allFinite();
}

double objective_value(const ConicProgram& program, const Vector& beta,
                       double tau) {
  return beta.lpNorm<1>() + program.c_penalty * tau * tau;
}

}  // namespace

AdmmState AdmmState::zero(const ConicProgram& program) {
  AdmmState state;
  const Eigen::Index p = program.p();
  state.beta = Vector::Zero(p);
  state.u = Vector::Zero(p);
  state.v = Vector::Zero(p);
  state.w = program.has_soc_block ? Vector::Zero(p) : Vector();
  state.tau = 0.0;
  state.s = Vector::Zero(program.rows());
  return state;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::diverged: return "diverged";
  }
  return "unknown";
}

Vector project_nonneg(const Eigen::Ref<const Vector>& x) {
  return x.cwiseMax(0.0);
}

std::pair<Vector, double> project_soc(const Eigen::Ref<const Vector>& x,
                                      double t) {
  const double norm = x.norm();
  if (norm <= t) return {x, t};
  if (norm <= -t) return {Vector::Zero(x.size()), 0.0};
  const double scale = 0.5 * (norm + t);
  return {(scale / norm) * x, scale};
}

Vector prox_l1(const Eigen::Ref<const Vector>& x, double threshold) {
  if (threshold < 0.0) throw InvalidInput("soft-threshold level must be >= 0");
  return x.unaryExpr([threshold](double value) {
    const double shrunk = std::abs(value) - threshold;
    return shrunk > 0.0 ? (value > 0.0 ? shrunk : -shrunk) : 0.0;
  });
}

Matrix sym_sqrt(const Eigen::Ref<const Matrix>& m) {
  if (m.rows() != m.cols()) throw InvalidInput("matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidInput("matrix is asymmetric beyond tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  Vector clamped = eig.eigenvalues().cwiseMax(0.0);
  Matrix root = eig.eigenvectors() * clamped.cwiseSqrt().asDiagonal() *
                eig.eigenvectors().transpose();
  return 0.5 * (root + root.transpose());
}

ConicProgram assemble_panda_program(const SuffStats& stats, double c,
                                    double lambda) {
  if (!(c > 0.0)) throw InvalidInput("penalty c must be positive");
  if (lambda < 0.0) throw InvalidInput("lambda must be nonnegative");
  ConicProgram prog;
  prog.a_top = stats.sigma_hat;
  prog.a_bot = stats.sigma_hat;
  prog.soc_mat = stats.sigma_hat_sqrt;
  prog.tau_coef = lambda * stats.sigma_hat_max;
  const Vector margin = Vector::Constant(stats.p, lambda * stats.sigma_hat_max);
  prog.b_top = stats.mu_hat_d + margin;
  prog.b_bot = stats.mu_hat_d - margin;
  prog.c_penalty = c;
  prog.lambda = lambda;
  prog.has_soc_block = true;
  prog.same_beta_block = true;
  return prog;
}

ConicProgram assemble_box_program(const SuffStats& stats, double rhs) {
  if (rhs < 0.0) throw InvalidInput("box bound must be nonnegative");
  ConicProgram prog;
  prog.a_top = stats.sigma_hat;
  prog.a_bot = stats.sigma_hat;
  const Vector margin = Vector::Constant(stats.p, rhs);
  prog.b_top = stats.mu_hat_d + margin;
  prog.b_bot = stats.mu_hat_d - margin;
  prog.has_soc_block = false;
  prog.same_beta_block = true;
  return prog;
}

ConicProgram assemble_adalda_stage1_program(const SuffStats& stats,
                                            double lambda) {
  if (lambda < 0.0) throw InvalidInput("lambda must be nonnegative");
  const double gamma = 4.0 * stats.sigma_hat_max * stats.sqrt_log_p_over_n();
  ConicProgram prog;
  const Matrix coupling =
      gamma * lambda * Vector::Ones(stats.p) * stats.mu_hat_d.transpose();
  prog.a_top = stats.sigma_hat - coupling;
  prog.a_bot = stats.sigma_hat + coupling;
  const Vector margin = Vector::Constant(stats.p, gamma);
  prog.b_top = stats.mu_hat_d + margin;
  prog.b_bot = stats.mu_hat_d - margin;
  prog.lambda = lambda;
  prog.has_soc_block = false;
  prog.same_beta_block = false;
  return prog;
}

Vector program_residual(const ConicProgram& program, const AdmmState& state) {
  const Eigen::Index p = program.p();
  Vector residual(program.rows());
  residual.head(p) = program.a_top * state.beta + state.u - program.b_top;
  residual.segment(p, p) =
      program.a_bot * state.beta - state.v - program.b_bot;
  if (program.has_soc_block) {
    const double shift = program.tau_coef * state.tau;
    residual.head(p).array() -= shift;
    residual.segment(p, p).array() += shift;
    residual.tail(p) = state.w - program.soc_mat * state.beta;
  }
  return residual;
}

double original_violation(const ConicProgram& program,
                          const Eigen::Ref<const Vector>& beta, double tau) {
  const double shift = program.tau_coef * tau;
  const Vector top = program.a_top * beta;
  const Vector bot = program.same_beta_block ? top : program.a_bot * beta;
  double violation =
      std::max(0.0, (top.array() - shift - program.b_top.array()).maxCoeff());
  violation = std::max(
      violation, (program.b_bot.array() - bot.array() - shift).maxCoeff());
  if (program.has_soc_block) {
    violation = std::max(violation, (program.soc_mat * beta).norm() - tau);
  }
  return violation;
}

StepSizes resolve_step_sizes(const ConicProgram& program,
                             const AdmmConfig& config) {
  if (config.eta > 0.0) return {config.eta, config.eta, config.eta};

  // lambda_max of the beta column block A_beta' A_beta by power iteration.
  const Eigen::Index p = program.p();
  Vector x = Vector::Ones(p).normalized();
  double lambda_max = 0.0;
  for (int iter = 0; iter < 30; ++iter) {
    Vector next = program.a_top.transpose() * (program.a_top * x);
    next.noalias() += program.a_bot.transpose() * (program.a_bot * x);
    if (program.has_soc_block) {
      next.noalias() += program.soc_mat.transpose() * (program.soc_mat * x);
    }
    const double norm = next.norm();
    if (norm <= 0.0 || !std::isfinite(norm)) break;
    lambda_max = norm;
    x = next / norm;
  }

  StepSizes eta;
  eta.beta = 0.9 / (config.rho * std::max(lambda_max, 1e-12));
  eta.slack = 0.9 / config.rho;
  const double tau_curvature =
      config.rho * 2.0 * static_cast<double>(p) * program.tau_coef *
          program.tau_coef +
      2.0 * program.c_penalty;
  eta.tau = 0.9 / std::max(tau_curvature, 1e-12);
  return eta;
}

AdmmState admm_step(const AdmmState& state, const ConicProgram& program,
                    const AdmmConfig& config) {
  Stepper stepper(program, config.rho, resolve_step_sizes(program, config));
  AdmmState next = state;
  stepper.sync(next);
  stepper.snapshot_products();
  stepper.step(next);
  return next;
}

Solution solve(const ConicProgram& program, const AdmmConfig& config,
               const std::optional<AdmmState>& init) {
  if (!(config.rho > 0.0) || !(config.primal_tol > 0.0) ||
      !(config.change_tol > 0.0) || config.max_iters < 1) {
    throw InvalidInput("solver configuration values must be positive");
  }
  const StepSizes eta = resolve_step_sizes(program, config);

  AdmmState state = init ? *init : AdmmState::zero(program);
  if (state.beta.size() != program.p() || state.s.size() != program.rows()) {
    throw InvalidInput("warm-start state does not match the program");
  }

  Solution sol;
  sol.steps_used = eta;
  sol.beta_hat = state.beta;
  sol.tau_hat = state.tau;

  Stepper stepper(program, config.rho, eta);
  stepper.sync(state);

  double best_residual = std::numeric_limits<double>::infinity();
  sol.status = SolveStatus::max_iters;

  int iter = 0;
  for (; iter < config.max_iters; ++iter) {
    stepper.snapshot_products();
    const double change_sq = stepper.step(state);

    const double rel_residual = stepper.relative_residual();
    if (!std::isfinite(rel_residual) || !state_finite(state)) {
      sol.status = SolveStatus::diverged;
      break;
    }

    if (rel_residual < best_residual) {
      best_residual = rel_residual;
      sol.beta_hat = state.beta;
      sol.tau_hat = state.tau;
    }

    if (config.trace_stride > 0 && iter % config.trace_stride == 0) {
      sol.trace.push_back({iter + 1, rel_residual,
                           objective_value(program, state.beta, state.tau)});
    }

    const double rel_change =
        std::sqrt(change_sq) / (1.0 + std::sqrt(state_norm_sq(state)));
    if (rel_residual <= config.primal_tol && rel_change <= config.change_tol) {
      sol.status = SolveStatus::converged;
      ++iter;
      break;
    }
  }

  sol.iterations = iter;
  sol.primal_residual = best_residual;
  sol.objective = objective_value(program, sol.beta_hat, sol.tau_hat);
  sol.final_state = std::move(state);
  return sol;
}

}  // namespace panda
