#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "panda/datagen.hpp"

using namespace panda;

TEST_CASE("ar(1) covariance has its closed form at p=2") {
  const GaussianModel model = build_model({SimModel::AR1, 2, 1, 1.0, 0});
  // Omega = [[1, .9], [.9, 1]] inverts to (1/0.19) [[1, -.9], [-.9, 1]].
  Matrix expected(2, 2);
  expected << 1.0, -0.9, -0.9, 1.0;
  expected /= 0.19;
  CHECK((model.sigma() - expected).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("true directions have their stated norms") {
  CHECK(build_model({SimModel::AR1, 50, 5, 1.0, 0}).beta_star().norm() ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(build_model({SimModel::VaryingDiagonal, 50, 5, 1.0, 1})
            .beta_star()
            .norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(build_model({SimModel::BlockSparse, 40, 5, 1.0, 1})
            .beta_star()
            .norm() == doctest::Approx(0.5).epsilon(1e-12));
  // The eta scale multiplies through.
  CHECK(build_model({SimModel::AR1, 50, 5, 2.0, 0}).beta_star().norm() ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("approximately sparse norm matches the geometric series") {
  for (int p : {100, 250}) {
    const GaussianModel model =
        build_model({SimModel::ApproxSparse, p, 0, 1.0, 0});
    double sum_sq = 0.0;
    for (int j = 1; j <= p; ++j) sum_sq += std::pow(0.75, 2 * j);
    CHECK(std::abs(model.beta_star().norm() - std::sqrt(sum_sq)) <= 1e-10);
    // And the l1 norm approaches the geometric limit 3.
    CHECK(model.beta_star().lpNorm<1>() == doctest::Approx(3.0).epsilon(1e-8));
  }
}

TEST_CASE("varying-diagonal recipe fills the diagonal as specified") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const GaussianModel model =
        build_model({SimModel::VaryingDiagonal, 10, 2, 1.0, seed});
    const Matrix& sigma = model.sigma();
    CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    for (int j = 0; j < 10; ++j) {
      if (j < 5) {
        CHECK(sigma(j, j) == 11.0);
      } else {
        CHECK(sigma(j, j) >= 1.0);
        CHECK(sigma(j, j) <= 2.0);
      }
    }
    CHECK(sigma(0, 1) == doctest::Approx(0.9));
    CHECK(sigma(0, 3) == doctest::Approx(std::pow(0.9, 3)));
  }
}

TEST_CASE("every recipe yields a positive-definite covariance") {
  for (SimModel model : {SimModel::AR1, SimModel::VaryingDiagonal,
                         SimModel::ErdosRenyi, SimModel::BlockSparse,
                         SimModel::ApproxSparse}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const int s = model == SimModel::ApproxSparse ? 0 : 4;
      const GaussianModel built = build_model({model, 24, s, 1.0, seed});
      Eigen::SelfAdjointEigenSolver<Matrix> eig(built.sigma(),
                                                Eigen::EigenvaluesOnly);
      CHECK(eig.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("sparse recipes put the support exactly on the first s coordinates") {
  for (SimModel model : {SimModel::AR1, SimModel::VaryingDiagonal,
                         SimModel::ErdosRenyi, SimModel::BlockSparse}) {
    const GaussianModel built = build_model({model, 30, 6, 1.0, 11});
    const Vector& beta = built.beta_star();
    for (int j = 0; j < 30; ++j) {
      if (j < 6) {
        CHECK(beta(j) != 0.0);
      } else {
        CHECK(beta(j) == 0.0);
      }
    }
  }
}

TEST_CASE("model construction is deterministic in the seed") {
  const SimSpec spec{SimModel::ErdosRenyi, 20, 4, 1.0, 31};
  const GaussianModel a = build_model(spec);
  const GaussianModel b = build_model(spec);
  CHECK(a.sigma() == b.sigma());
  const GaussianModel c = build_model({SimModel::ErdosRenyi, 20, 4, 1.0, 32});
  CHECK(a.sigma() != c.sigma());
}

TEST_CASE("sampling is seed-deterministic with independent classes") {
  const GaussianModel model = build_model({SimModel::AR1, 8, 2, 1.0, 0});
  const auto [a0, a1] = sample(model, 12, 9, 77);
  const auto [b0, b1] = sample(model, 12, 9, 77);
  CHECK(a0 == b0);
  CHECK(a1 == b1);
  const auto [c0, c1] = sample(model, 12, 9, 78);
  CHECK(a0 != c0);
  (void)c1;
}

TEST_CASE("sample moments converge to the model's") {
  const GaussianModel model = build_model({SimModel::AR1, 5, 2, 1.0, 0});
  const Matrix draws = sample_class(model, model.mu1(), 100000, 4242);

  const Vector mean = draws.colwise().mean();
  CHECK((mean - model.mu1()).cwiseAbs().maxCoeff() <= 0.02 * 3.0);

  const Matrix centered = draws.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / double(draws.rows());
  CHECK((cov - model.sigma()).norm() <= 0.05 * model.sigma().norm());
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(build_model({SimModel::AR1, 1, 1, 1.0, 0}), InvalidInput);
  CHECK_THROWS_AS(build_model({SimModel::AR1, 10, 0, 1.0, 0}), InvalidInput);
  CHECK_THROWS_AS(build_model({SimModel::AR1, 10, 11, 1.0, 0}), InvalidInput);
  const GaussianModel model = build_model({SimModel::AR1, 10, 4, 1.0, 0});
  CHECK_THROWS_AS(kclass_means(model, {SimModel::AR1, 10, 4, 1.0, 0}, 4),
                  InvalidInput);
}
