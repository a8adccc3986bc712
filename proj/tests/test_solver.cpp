#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "panda/solver.hpp"
#include "support/test_utils.hpp"

using namespace panda;
using panda::testing::make_stats;
using panda::testing::random_spd;
using panda::testing::random_vector;

namespace {

SuffStats scalar_instance(double sigma, double mu) {
  return make_stats(Matrix::Constant(1, 1, sigma), Vector::Constant(1, mu));
}

}  // namespace

TEST_CASE("program assembly on the scalar instance") {
  const SuffStats stats = scalar_instance(1.0, 1.0);
  const ConicProgram prog = assemble_panda_program(stats, 1.0, 0.1);
  CHECK(prog.a_top(0, 0) == 1.0);
  CHECK(prog.a_bot(0, 0) == 1.0);
  CHECK(prog.soc_mat(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(prog.tau_coef == doctest::Approx(0.1));
  CHECK(prog.b_top(0) == doctest::Approx(1.1));
  CHECK(prog.b_bot(0) == doctest::Approx(0.9));
  CHECK(prog.has_soc_block);
  CHECK(prog.rows() == 3);

  // Row identities: beta - 0.1 tau + u = 1.1; beta + 0.1 tau - v = 0.9;
  // w - beta = 0.
  AdmmState state = AdmmState::zero(prog);
  state.beta(0) = 2.0;
  state.tau = 3.0;
  state.u(0) = 0.5;
  state.v(0) = 0.25;
  state.w(0) = 1.5;
  const Vector residual = program_residual(prog, state);
  CHECK(residual(0) == doctest::Approx(2.0 - 0.3 + 0.5 - 1.1).epsilon(1e-14));
  CHECK(residual(1) == doctest::Approx(2.0 + 0.3 - 0.25 - 0.9).epsilon(1e-14));
  CHECK(residual(2) == doctest::Approx(1.5 - 2.0).epsilon(1e-14));
}

TEST_CASE("zero lambda collapses the margin") {
  const SuffStats stats = scalar_instance(2.0, 0.7);
  const ConicProgram prog = assemble_panda_program(stats, 1.0, 0.0);
  CHECK(prog.tau_coef == 0.0);
  CHECK(prog.b_top(0) == doctest::Approx(0.7));
  CHECK(prog.b_bot(0) == doctest::Approx(0.7));
}

TEST_CASE("assembly rejects bad parameters") {
  const SuffStats stats = scalar_instance(1.0, 1.0);
  CHECK_THROWS_AS(assemble_panda_program(stats, 0.0, 0.1), InvalidInput);
  CHECK_THROWS_AS(assemble_panda_program(stats, 1.0, -0.1), InvalidInput);
  CHECK_THROWS_AS(assemble_box_program(stats, -1.0), InvalidInput);
}

TEST_CASE("split form agrees with the original constraints at random points") {
  Rng rng(41);
  const int p = 4;
  const SuffStats stats =
      make_stats(random_spd(p, rng), random_vector(p, rng));
  const double lambda = 0.4, c = 2.0;
  const ConicProgram prog = assemble_panda_program(stats, c, lambda);
  const double margin = lambda * stats.sigma_hat_max;

  for (int trial = 0; trial < 20; ++trial) {
    AdmmState state = AdmmState::zero(prog);
    state.beta = random_vector(p, rng);
    state.tau = rng.uniform(0.0, 2.0);
    // Slacks chosen to make the equalities hold exactly.
    const Vector gap = stats.sigma_hat * state.beta - stats.mu_hat_d;
    state.u = Vector::Constant(p, margin * (state.tau + 1.0)) - gap;
    state.v = gap + Vector::Constant(p, margin * (state.tau + 1.0));
    state.w = stats.sigma_hat_sqrt * state.beta;
    CHECK(program_residual(prog, state).lpNorm<Eigen::Infinity>() <= 1e-12);

    // And the slack values recover the original-constraint margins.
    for (int j = 0; j < p; ++j) {
      CHECK(state.u(j) ==
            doctest::Approx(margin * (state.tau + 1.0) - gap(j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("nonnegative projection") {
  Vector x(3);
  x << 1.0, -2.0, 0.0;
  const Vector projected = project_nonneg(x);
  CHECK(projected(0) == 1.0);
  CHECK(projected(1) == 0.0);
  CHECK(projected(2) == 0.0);

  Vector nonneg(3);
  nonneg << 0.5, 0.0, 3.0;
  CHECK(project_nonneg(nonneg) == nonneg);

  Rng rng(4242);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector a = random_vector(6, rng, -3.0, 3.0);
    const Vector b = random_vector(6, rng, -3.0, 3.0);
    const Vector pa = project_nonneg(a);
    CHECK((project_nonneg(pa) - pa).norm() <= 1e-15);
    CHECK((pa - project_nonneg(b)).norm() <= (a - b).norm() + 1e-10);
  }
}

TEST_CASE("second-order cone projection") {
  {
    Vector x(2);
    x << 0.0, 0.0;
    auto [px, pt] = project_soc(x, 1.0);
    CHECK(px.norm() == 0.0);
    CHECK(pt == 1.0);
  }
  {
    Vector x(2);
    x << 3.0, 4.0;
    auto [px, pt] = project_soc(x, -10.0);
    CHECK(px.norm() == 0.0);
    CHECK(pt == 0.0);
  }
  {
    Vector x(2);
    x << 3.0, 4.0;
    auto [px, pt] = project_soc(x, 0.0);
    CHECK(px(0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(px(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(pt == doctest::Approx(2.5).epsilon(1e-14));
  }

  Rng rng(909);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector a = random_vector(4, rng, -2.0, 2.0);
    const double ta = rng.uniform(-2.0, 2.0);
    auto [pa, pta] = project_soc(a, ta);
    CHECK(pa.norm() <= pta + 1e-12);  // membership
    auto [paa, ptaa] = project_soc(pa, pta);
    CHECK((paa - pa).norm() + std::abs(ptaa - pta) <= 1e-10);  // idempotent

    const Vector b = random_vector(4, rng, -2.0, 2.0);
    const double tb = rng.uniform(-2.0, 2.0);
    auto [pb, ptb] = project_soc(b, tb);
    const double dist_before =
        std::sqrt((a - b).squaredNorm() + (ta - tb) * (ta - tb));
    const double dist_after =
        std::sqrt((pa - pb).squaredNorm() + (pta - ptb) * (pta - ptb));
    CHECK(dist_after <= dist_before + 1e-10);  // nonexpansive
  }
}

TEST_CASE("soft thresholding") {
  Vector x(3);
  x << 2.0, -0.5, 0.0;
  const Vector shrunk = prox_l1(x, 1.0);
  CHECK(shrunk(0) == 1.0);
  CHECK(shrunk(1) == 0.0);
  CHECK(shrunk(2) == 0.0);
  CHECK(prox_l1(x, 0.0) == x);
  CHECK_THROWS_AS(prox_l1(x, -0.5), InvalidInput);

  // The prox value beats a dense per-coordinate grid on the prox objective.
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const double value = rng.uniform(-3.0, 3.0);
    const double threshold = rng.uniform(0.0, 2.0);
    const double prox =
        prox_l1(Vector::Constant(1, value), threshold)(0);
    const auto objective = [&](double z) {
      return threshold * std::abs(z) + 0.5 * (z - value) * (z - value);
    };
    double best = objective(prox);
    for (double z = value - 2.5; z <= value + 2.5; z += 1e-4) {
      CHECK(best <= objective(z) + 1e-8);
    }
  }
}

TEST_CASE("symmetric square root") {
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 4.0;
  diag(1, 1) = 9.0;
  const Matrix root = sym_sqrt(diag);
  CHECK(root(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(root(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(root(0, 1)) <= 1e-14);

  CHECK(sym_sqrt(Matrix::Identity(3, 3))
            .isApprox(Matrix::Identity(3, 3), 1e-14));

  Rng rng(77);
  const Matrix spd = random_spd(10, rng, 0.0, 3.0);
  const Matrix spd_root = sym_sqrt(spd);
  CHECK((spd_root * spd_root - spd).norm() <= 1e-10 * spd.norm());

  Matrix asym = Matrix::Identity(3, 3);
  asym(0, 1) = 1e-6;
  CHECK_THROWS_AS(sym_sqrt(asym), InvalidInput);
}

TEST_CASE("the origin is a fixed point of the trivial program") {
  const SuffStats stats = scalar_instance(1.0, 0.0);
  const ConicProgram prog = assemble_panda_program(stats, 1.0, 0.0);
  AdmmConfig cfg;
  AdmmState state = AdmmState::zero(prog);
  for (int iter = 0; iter < 5; ++iter) {
    state = admm_step(state, prog, cfg);
    CHECK(state.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(state.tau == 0.0);
    CHECK(state.u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(state.v.cwiseAbs().maxCoeff() == 0.0);
    CHECK(state.s.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("one sweep matches hand arithmetic on the scalar instance") {
  // Sigma = [1], mu_d = [2], lambda = 0.1, sigma_max = 1, c = 1, rho = 1,
  // every block stepped at eta = 0.1.
  const SuffStats stats = scalar_instance(1.0, 2.0);
  const ConicProgram prog = assemble_panda_program(stats, 1.0, 0.1);
  AdmmConfig cfg;
  cfg.rho = 1.0;
  cfg.eta = 0.1;

  const double eta = 0.1;
  // Residuals at zero: r1 = -2.1, r2 = -1.9, r3 = 0.
  double r1 = -2.1, r2 = -1.9, r3 = 0.0;
  // beta step: gradient r1 + r2 - r3, soft-threshold at eta.
  const double beta_tilde = 0.0 - eta * (r1 + r2 - r3);
  const double beta1 = std::max(std::abs(beta_tilde) - eta, 0.0) *
                       (beta_tilde > 0 ? 1.0 : -1.0);
  r1 += beta1;
  r2 += beta1;
  r3 -= beta1;
  // u and v steps with clamping.
  const double u1 = std::max(0.0 - eta * r1, 0.0);
  r1 += u1;
  const double v1 = std::max(0.0 + eta * r2, 0.0);
  r2 -= v1;
  // joint (w, tau) step and cone projection.
  const double tau_tilde = 0.0 - eta * (2.0 * 0.0 + 0.1 * (r2 - r1));
  const double w_tilde = 0.0 - eta * r3;
  double w1, tau1;
  const double norm = std::abs(w_tilde);
  if (norm <= tau_tilde) {
    w1 = w_tilde;
    tau1 = tau_tilde;
  } else if (norm <= -tau_tilde) {
    w1 = 0.0;
    tau1 = 0.0;
  } else {
    const double scale = 0.5 * (norm + tau_tilde);
    w1 = scale * (w_tilde >= 0 ? 1.0 : -1.0);
    tau1 = scale;
  }
  r1 += -0.1 * tau1;
  r2 += 0.1 * tau1;
  r3 += w1;
  // dual update.
  const double s1 = r1, s2 = r2, s3 = r3;

  const AdmmState next = admm_step(AdmmState::zero(prog), prog, cfg);
  CHECK(next.beta(0) == doctest::Approx(beta1).epsilon(1e-14));
  CHECK(next.u(0) == doctest::Approx(u1).epsilon(1e-14));
  CHECK(next.v(0) == doctest::Approx(v1).epsilon(1e-14));
  CHECK(next.w(0) == doctest::Approx(w1).epsilon(1e-14));
  CHECK(next.tau == doctest::Approx(tau1).epsilon(1e-14));
  CHECK(next.s(0) == doctest::Approx(s1).epsilon(1e-14));
  CHECK(next.s(1) == doctest::Approx(s2).epsilon(1e-14));
  CHECK(next.s(2) == doctest::Approx(s3).epsilon(1e-14));
}

TEST_CASE("iterates stay in the cones") {
  Rng rng(5150);
  AdmmConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 1 + static_cast<int>(rng.uniform() * 4.0);
    const SuffStats stats =
        make_stats(random_spd(p, rng), random_vector(p, rng));
    const ConicProgram prog =
        assemble_panda_program(stats, rng.uniform(0.5, 3.0),
                               rng.uniform(0.05, 0.8));
    AdmmState state = AdmmState::zero(prog);
    state.beta = random_vector(p, rng);
    state.s = random_vector(3 * p, rng);
    state = admm_step(state, prog, cfg);
    CHECK(state.u.minCoeff() >= 0.0);
    CHECK(state.v.minCoeff() >= 0.0);
    CHECK(state.w.norm() <= state.tau + 1e-12);
  }
}

TEST_CASE("scalar instance matches the dense two-variable grid oracle") {
  // min |beta| + tau^2 s.t. |beta - 2| <= 0.1 (tau + 1), |beta| <= tau.
  const SuffStats stats = scalar_instance(1.0, 2.0);
  const ConicProgram prog = assemble_panda_program(stats, 1.0, 0.1);
  AdmmConfig cfg;
  cfg.max_iters = 100000;
  cfg.primal_tol = 1e-9;
  cfg.change_tol = 1e-11;
  const Solution sol = solve(prog, cfg);
  CHECK(sol.status == SolveStatus::converged);

  double best = std::numeric_limits<double>::infinity();
  for (double beta = -3.0; beta <= 3.0; beta += 1e-3) {
    for (double tau = 0.0; tau <= 4.0; tau += 1e-3) {
      if (std::abs(beta - 2.0) > 0.1 * (tau + 1.0)) continue;
      if (std::abs(beta) > tau) continue;
      best = std::min(best, std::abs(beta) + tau * tau);
    }
  }
  CHECK(std::abs(sol.objective - best) <= 1e-2 * (1.0 + std::abs(best)));
  CHECK(original_violation(prog, sol.beta_hat, sol.tau_hat) <= 1e-6);
}

TEST_CASE("zero mean difference solves to the origin") {
  const SuffStats stats = scalar_instance(1.5, 0.0);
  const ConicProgram prog = assemble_panda_program(stats, 2.0, 0.3);
  const Solution sol = solve(prog, AdmmConfig{});
  CHECK(sol.beta_hat.cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(std::abs(sol.tau_hat) <= 1e-8);
  CHECK(sol.objective <= 1e-8);
}

TEST_CASE("mean shifts translate the box-program solution") {
  // p = 1 with unit covariance: the minimizer is mu_d - rhs for mu_d > rhs,
  // so shifting mu_d shifts the solution one-for-one.
  AdmmConfig cfg;
  cfg.primal_tol = 1e-10;
  cfg.change_tol = 1e-12;
  cfg.max_iters = 100000;
  const Solution base =
      solve(assemble_box_program(scalar_instance(1.0, 2.0), 0.5), cfg);
  const Solution shifted =
      solve(assemble_box_program(scalar_instance(1.0, 3.0), 0.5), cfg);
  CHECK(base.beta_hat(0) == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(shifted.beta_hat(0) ==
        doctest::Approx(base.beta_hat(0) + 1.0).epsilon(1e-6));
}

TEST_CASE("best-so-far residual is nonincreasing and reported") {
  Rng rng(616);
  const SuffStats stats = make_stats(random_spd(3, rng),
                                     random_vector(3, rng));
  const ConicProgram prog = assemble_panda_program(stats, 1.5, 0.4);
  AdmmConfig cfg;
  cfg.trace_stride = 1;
  cfg.max_iters = 3000;
  const Solution sol = solve(prog, cfg);
  REQUIRE(!sol.trace.empty());
  double running = std::numeric_limits<double>::infinity();
  double best_seen = running;
  for (const TracePoint& point : sol.trace) {
    running = std::min(running, point.primal_residual);
    CHECK(running <= best_seen + 1e-15);
    best_seen = running;
  }
  CHECK(sol.primal_residual <= running + 1e-15);
}

TEST_CASE("absurd step sizes diverge gracefully") {
  const SuffStats stats = scalar_instance(1.0, 2.0);
  const ConicProgram prog = assemble_panda_program(stats, 1.0, 0.1);
  AdmmConfig cfg;
  cfg.eta = 1e12;
  cfg.max_iters = 5000;
  const Solution sol = solve(prog, cfg);
  CHECK(sol.status == SolveStatus::diverged);
  CHECK(sol.beta_hat.allFinite());
}

TEST_CASE("warm starts resume where the solve ended") {
  Rng rng(88);
  const SuffStats stats = make_stats(random_spd(4, rng),
                                     random_vector(4, rng));
  const ConicProgram prog = assemble_panda_program(stats, 2.0, 0.5);
  AdmmConfig cfg;
  const Solution cold = solve(prog, cfg);
  REQUIRE(cold.status == SolveStatus::converged);
  const Solution warm = solve(prog, cfg, cold.final_state);
  CHECK(warm.iterations <= cold.iterations / 4);
  CHECK(std::abs(warm.objective - cold.objective) <=
        1e-6 * (1.0 + std::abs(cold.objective)));
}
