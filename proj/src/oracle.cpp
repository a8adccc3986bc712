#include "panda/oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "panda/estimators.hpp"

namespace panda {

namespace {

constexpr int kLevels = 6;
constexpr int kPointsPerDim = 41;  // odd, so every grid contains its center

//! Minimize a convex function over [center - half, center + half]^p by a
//! dense grid with successive refinement around the incumbent. Points where
//! the function is +inf (infeasible) are skipped; the center is assumed
//! feasible at level 0.
struct ZoomResult {
  Vector argmin;
  double value = std::numeric_limits<double>::infinity();
  bool interior = true;
};

ZoomResult zoom_minimize(int p, Vector center, double half,
                         const std::function<double(const Vector&)>& f) {
  ZoomResult best;
  best.argmin = center;
  best.value = f(center);
  const double initial_half = half;
  const Vector initial_center = center;

  Vector point(p);
  std::vector<int> idx(p, 0);
  for (int level = 0; level < kLevels; ++level) {
    const double step = 2.0 * half / (kPointsPerDim - 1);
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      for (int d = 0; d < p; ++d) {
        point(d) = center(d) - half + step * idx[d];
      }
      const double value = f(point);
      if (value < best.value) {
        best.value = value;
        best.argmin = point;
      }
      int d = 0;
      for (; d < p; ++d) {
        if (++idx[d] < kPointsPerDim) break;
        idx[d] = 0;
      }
      if (d == p) break;
    }
    center = best.argmin;
    half = 5.0 * step;  // refined box generously covers the incumbent cell
  }

  const double margin = 2.0 * initial_half / (kPointsPerDim - 1);
  for (int d = 0; d < p; ++d) {
    if (std::abs(best.argmin(d) - initial_center(d)) >
        initial_half - margin) {
      best.interior = false;
    }
  }
  return best;
}

double inf_norm(const Vector& v) { return v.lpNorm<Eigen::Infinity>(); }

}  // namespace

OracleResult oracle_panda(const SuffStats& stats, double c, double lambda) {
  const int p = static_cast<int>(stats.p);
  const double bound = lambda * stats.sigma_hat_max;
  const auto tau_min = [&](const Vector& beta) {
    const double cone = std::sqrt(
        std::max(0.0, beta.dot(stats.sigma_hat * beta)));
    if (bound <= 0.0) return cone;
    const double rows =
        inf_norm(stats.sigma_hat * beta - stats.mu_hat_d) / bound - 1.0;
    return std::max(cone, rows);
  };
  const auto objective = [&](const Vector& beta) {
    const double tau = tau_min(beta);
    return beta.lpNorm<1>() + c * tau * tau;
  };

  // Any beta costing more than the origin is irrelevant, which bounds the
  // l1 ball to search.
  const double origin_cost = objective(Vector::Zero(p));
  const double half = std::max(1.5, 1.2 * origin_cost);
  ZoomResult zoom = zoom_minimize(p, Vector::Zero(p), half, objective);

  OracleResult result;
  result.beta = zoom.argmin;
  result.tau = tau_min(zoom.argmin);
  result.objective = zoom.value;
  result.interior = zoom.interior;
  return result;
}

OracleResult oracle_box_lp(const SuffStats& stats, double rhs) {
  if (rhs < 0.0) throw InvalidInput("box bound must be nonnegative");
  const int p = static_cast<int>(stats.p);
  Eigen::LLT<Matrix> llt(stats.sigma_hat);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("oracle needs a positive-definite covariance");
  }
  const auto beta_of = [&](const Vector& y) {
    return Vector(llt.solve(stats.mu_hat_d + y));
  };
  // Refinement boxes can poke outside the feasible box; such points are not
  // candidates.
  const auto objective = [&](const Vector& y) {
    if (inf_norm(y) > rhs * (1.0 + 1e-12)) {
      return std::numeric_limits<double>::infinity();
    }
    return beta_of(y).lpNorm<1>();
  };

  OracleResult result;
  if (rhs == 0.0) {
    // The feasible set is the single point y = 0.
    result.beta = beta_of(Vector::Zero(p));
    result.objective = result.beta.lpNorm<1>();
    return result;
  }
  ZoomResult zoom = zoom_minimize(p, Vector::Zero(p), rhs, objective);
  result.beta = beta_of(zoom.argmin);
  result.objective = zoom.value;
  result.interior = true;  // the search box is exactly the feasible set
  return result;
}

OracleResult oracle_adalda_stage1(const SuffStats& stats, double lambda) {
  const int p = static_cast<int>(stats.p);
  const double gamma = 4.0 * stats.sigma_hat_max * stats.sqrt_log_p_over_n();
  Eigen::LLT<Matrix> llt(stats.sigma_hat);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("oracle needs a positive-definite covariance");
  }
  const Vector sig_inv_mu = llt.solve(stats.mu_hat_d);
  const double base = gamma * (1.0 + lambda * stats.mu_hat_d.dot(sig_inv_mu));
  const Vector slope = gamma * lambda * sig_inv_mu;

  const auto beta_of = [&](const Vector& y) {
    return Vector(llt.solve(stats.mu_hat_d + y));
  };
  const double infinity = std::numeric_limits<double>::infinity();
  const auto objective = [&](const Vector& y) {
    if (inf_norm(y) > base + slope.dot(y) + 1e-12) return infinity;
    return beta_of(y).lpNorm<1>();
  };

  OracleResult result;
  if (gamma == 0.0) {
    result.beta = beta_of(Vector::Zero(p));
    result.objective = result.beta.lpNorm<1>();
    return result;
  }

  // ||y||_inf <= base + slope'y and the objective never exceeding its value
  // at y = 0 bound the search box.
  const double obj0 = sig_inv_mu.lpNorm<1>();
  const double y_bound =
      stats.sigma_hat.cwiseAbs().rowwise().sum().maxCoeff() * obj0 +
      inf_norm(stats.mu_hat_d) + base;
  ZoomResult zoom = zoom_minimize(p, Vector::Zero(p), y_bound, objective);
  result.beta = beta_of(zoom.argmin);
  result.objective = zoom.value;
  result.interior = zoom.interior;
  return result;
}

OracleInstance random_oracle_instance(int p, Rng& rng) {
  // Random rotation times a bounded spectrum keeps everything
  // well-conditioned.
  Matrix gauss(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) gauss(i, j) = rng.normal();
  }
  const Matrix q = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
  Vector eigenvalues(p);
  for (int i = 0; i < p; ++i) eigenvalues(i) = rng.uniform(0.6, 1.6);
  Matrix sigma = q * eigenvalues.asDiagonal() * q.transpose();
  sigma = 0.5 * (sigma + sigma.transpose()).eval();

  OracleInstance inst;
  inst.stats.p = p;
  inst.stats.n0 = inst.stats.n1 = inst.stats.n = 40;
  inst.stats.sigma_hat = sigma;
  inst.stats.sigma_hat_sqrt = sym_sqrt(sigma);
  inst.stats.sigma_hat_max = std::sqrt(sigma.diagonal().maxCoeff());
  inst.stats.mu_hat_d = Vector(p);
  for (int i = 0; i < p; ++i) inst.stats.mu_hat_d(i) = rng.uniform(-1.0, 1.0);
  inst.stats.mu_hat0 = Vector::Zero(p);
  inst.stats.mu_hat1 = inst.stats.mu_hat_d;
  inst.stats.mu_hat_m = 0.5 * inst.stats.mu_hat_d;
  inst.c = rng.uniform(0.5, 4.0);
  inst.lambda = rng.uniform(0.3, 0.9);
  return inst;
}

OracleCheckReport run_oracle_battery(int n_instances, int max_p,
                                     std::uint64_t seed,
                                     const AdmmConfig& cfg) {
  OracleCheckReport report;
  if (n_instances <= 0) return report;
  if (max_p < 1 || max_p > 3) {
    throw InvalidInput("the grid oracles support p between 1 and 3");
  }

  auto record = [&report](int p, int instance, const std::string& method,
                          double solver_obj, double oracle_obj,
                          double violation) {
    const double gap =
        std::abs(solver_obj - oracle_obj) / (1.0 + std::abs(oracle_obj));
    report.rows.push_back(
        {p, instance, method, solver_obj, oracle_obj, gap, violation});
    report.max_rel_gap = std::max(report.max_rel_gap, gap);
    report.max_violation = std::max(report.max_violation, violation);
  };

  for (int p = 1; p <= max_p; ++p) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p)));
    for (int instance = 0; instance < n_instances; ++instance) {
      const OracleInstance inst = random_oracle_instance(p, rng);
      const SuffStats& stats = inst.stats;
      ++report.instances;

      {
        FitResult fit = panda_fit(stats, inst.c, inst.lambda, cfg);
        const OracleResult ref = oracle_panda(stats, inst.c, inst.lambda);
        ConicProgram prog = assemble_panda_program(stats, inst.c, inst.lambda);
        record(p, instance, "panda",
               fit.beta_hat.lpNorm<1>() + inst.c * *fit.tau_hat * *fit.tau_hat,
               ref.objective,
               original_violation(prog, fit.beta_hat, *fit.tau_hat));
      }
      {
        FitResult fit = lpd_fit(stats, inst.lambda, cfg);
        const double rhs = inst.lambda * stats.sigma_hat_max;
        const OracleResult ref = oracle_box_lp(stats, rhs);
        ConicProgram prog = assemble_box_program(stats, rhs);
        record(p, instance, "lpd", fit.beta_hat.lpNorm<1>(), ref.objective,
               original_violation(prog, fit.beta_hat, 0.0));
      }
      {
        FitResult fit = adalda_fit(stats, inst.lambda, cfg);
        const OracleResult ref1 = oracle_adalda_stage1(stats, inst.lambda);
        ConicProgram stage1 =
            assemble_adalda_stage1_program(stats, inst.lambda);
        record(p, instance, "adalda_stage1", fit.stage1_beta->lpNorm<1>(),
               ref1.objective,
               original_violation(stage1, *fit.stage1_beta, 0.0));

        // Stage 2 reuses the solver's signal estimate on both sides.
        const double gamma =
            4.0 * stats.sigma_hat_max * stats.sqrt_log_p_over_n();
        const double rhs =
            gamma * std::sqrt(inst.lambda * *fit.delta_hat * *fit.delta_hat +
                              1.0);
        const OracleResult ref2 = oracle_box_lp(stats, rhs);
        ConicProgram stage2 = assemble_box_program(stats, rhs);
        record(p, instance, "adalda_stage2", fit.beta_hat.lpNorm<1>(),
               ref2.objective,
               original_violation(stage2, fit.beta_hat, 0.0));
      }
    }
  }
  return report;
}

}  // namespace panda
