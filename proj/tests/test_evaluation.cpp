#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "panda/datagen.hpp"
#include "panda/evaluation.hpp"
#include "support/test_utils.hpp"

using namespace panda;
using panda::testing::random_vector;

TEST_CASE("estimation errors") {
  Vector beta(3);
  beta << 1.0, -2.0, 0.5;
  {
    auto [l1, l2] = estimation_errors(beta, beta);
    CHECK(l1 == 0.0);
    CHECK(l2 == 0.0);
  }
  {
    const GaussianModel model = build_model({SimModel::AR1, 40, 5, 1.0, 0});
    auto [l1, l2] =
        estimation_errors(Vector::Zero(40), model.beta_star());
    CHECK(l2 == doctest::Approx(2.0).epsilon(1e-12));
    (void)l1;
  }
  {
    Rng rng(8);
    const Vector a = random_vector(20, rng), b = random_vector(20, rng);
    auto [l1, l2] = estimation_errors(a, b);
    double l1_oracle = 0.0, l2_oracle = 0.0;
    for (int j = 0; j < 20; ++j) {
      l1_oracle += std::abs(a(j) - b(j));
      l2_oracle += (a(j) - b(j)) * (a(j) - b(j));
    }
    CHECK(std::abs(l1 - l1_oracle) <= 1e-14 * (1.0 + l1_oracle));
    CHECK(std::abs(l2 - std::sqrt(l2_oracle)) <= 1e-14);
  }
}

TEST_CASE("signal-size relative error") {
  CHECK(tau_relative_error(2.0, 2.0) == 0.0);
  CHECK(tau_relative_error(0.0, 2.0) == 1.0);
  CHECK(tau_relative_error(std::sqrt(2.0) * 2.0, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(tau_relative_error(1.0, 0.0), InvalidInput);
}

TEST_CASE("empirical misclassification") {
  // beta = 0 labels everything 0: half wrong on a balanced set.
  const LinearRule zero{Vector::Zero(2), Vector::Zero(2)};
  CHECK(empirical_error(zero, Matrix::Zero(50, 2), Matrix::Ones(50, 2)) ==
        0.5);

  // Monte-Carlo agreement with the closed form for the optimal rule.
  const GaussianModel model = build_model({SimModel::AR1, 4, 2, 1.0, 0});
  const auto [test0, test1] = sample(model, 100000, 100000, 99);
  const LinearRule bayes{model.mu_m(), model.beta_star()};
  CHECK(std::abs(empirical_error(bayes, test0, test1) - model.bayes_risk()) <=
        0.01);

  // Empty class-1 side with a perfect class-0 rule.
  Matrix test_only0(3, 2);
  test_only0 << -1, 0, -2, 0.5, -3, -0.5;
  LinearRule separating{Vector::Zero(2), Vector::Unit(2, 0)};
  CHECK(empirical_error(separating, test_only0, Matrix::Zero(0, 2)) == 0.0);
}

TEST_CASE("variable selection counts") {
  Vector truth(6);
  truth << 0.9, 0.8, 0.7, 0.0, 0.0, 0.0;
  {
    const SelectionCounts counts = variable_selection(truth, truth);
    CHECK(counts.tp == 3);
    CHECK(counts.tn == 3);
    CHECK(counts.precision == 1.0);
    CHECK(counts.recall == 1.0);
  }
  {
    const SelectionCounts counts =
        variable_selection(Vector::Zero(6), truth);
    CHECK(counts.tp == 0);
    CHECK(counts.tn == 3);
    CHECK(counts.recall == 0.0);
    CHECK(counts.precision == 1.0);  // 0/0 reported as 1
  }
  {
    // TP + FN = s and TN + FP = p - s by construction.
    Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
      Vector estimate = random_vector(6, rng, -0.05, 0.05);
      const SelectionCounts counts = variable_selection(estimate, truth);
      const double fn = 3 - counts.tp;
      const double fp = 3 - counts.tn;
      CHECK(counts.tp + fn == 3);
      CHECK(counts.tn + fp == 3);
      CHECK(counts.tp <= 3);
      CHECK(counts.tn <= 3);
      if (counts.tp + fp > 0) {
        CHECK(counts.precision ==
              doctest::Approx(counts.tp / (counts.tp + fp)));
      }
    }
  }
}

TEST_CASE("rank-based auc") {
  CHECK(auc_from_scores({1.0, 2.0, 3.0}, {4.0, 5.0}) == 1.0);
  CHECK(auc_from_scores({2.0, 2.0}, {2.0, 2.0, 2.0}) == 0.5);

  Rng rng(7);
  std::vector<double> scores0(10000), scores1(10000);
  for (auto& value : scores0) value = rng.normal();
  for (auto& value : scores1) value = rng.normal();
  const double chance = auc_from_scores(scores0, scores1);
  CHECK(std::abs(chance - 0.5) <= 0.02);

  // Invariance under strictly increasing transforms.
  std::vector<double> shifted0, shifted1;
  for (double value : scores0) shifted0.push_back(2.0 * value + 1.0);
  for (double value : scores1) shifted1.push_back(2.0 * value + 1.0);
  CHECK(auc_from_scores(shifted0, shifted1) ==
        doctest::Approx(chance).epsilon(1e-15));

  CHECK_THROWS_AS(auc_from_scores({}, {1.0}), InvalidInput);
}

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig config;
  config.spec = SimSpec{SimModel::AR1, 12, 3, 1.0, 0};
  config.methods = {Method::PANDA, Method::Bayes};
  config.n0 = config.n1 = 25;
  config.n_val = 25;
  config.n_test = 40;
  config.replicates = 2;
  TuneGrid grid;
  grid.lambda_tilde_values = {0.5, 1.0, 2.0};
  config.grid = grid;
  config.seed = 5;
  return config;
}

}  // namespace

TEST_CASE("identical replicate seeds give identical rows and zero sd") {
  ExperimentConfig config = tiny_config();
  config.replicate_seeds = std::vector<std::uint64_t>{42, 42};
  const ExperimentResult result = run_replicates(config);
  REQUIRE(result.failures.empty());
  REQUIRE(result.rows.size() == 4);

  for (const std::string& method : {"panda", "bayes"}) {
    std::vector<MetricsRow> rows;
    for (const MetricsRow& row : result.rows) {
      if (row.method == method) rows.push_back(row);
    }
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].l2_err == rows[1].l2_err);
    CHECK(rows[0].pop_risk == rows[1].pop_risk);
    CHECK(rows[0].auc == rows[1].auc);
  }
  for (const AggregateRow& agg : result.aggregates) {
    if (agg.metric == "wall_time_s") continue;
    CHECK(agg.sd == 0.0);
  }
}

TEST_CASE("aggregates match an independent recomputation") {
  const ExperimentResult result = run_replicates(tiny_config());
  REQUIRE(!result.rows.empty());

  for (const AggregateRow& agg : result.aggregates) {
    if (agg.metric == "wall_time_s") continue;
    std::vector<double> values;
    for (const MetricsRow& row : result.rows) {
      if (row.method != agg.method) continue;
      if (agg.metric == "l2_err") values.push_back(row.l2_err);
      else if (agg.metric == "pop_risk") values.push_back(row.pop_risk);
      else if (agg.metric == "tau_rel_err" && row.tau_rel_err)
        values.push_back(*row.tau_rel_err);
      else if (agg.metric == "auc") values.push_back(row.auc);
      else continue;
    }
    if (values.empty()) continue;
    double mean = 0.0;
    for (double value : values) mean += value;
    mean /= double(values.size());
    double ss = 0.0;
    for (double value : values) ss += (value - mean) * (value - mean);
    const double sd =
        values.size() > 1 ? std::sqrt(ss / double(values.size() - 1)) : 0.0;
    CHECK(std::abs(agg.mean - mean) <= 1e-12 * (1.0 + std::abs(mean)));
    CHECK(std::abs(agg.sd - sd) <= 1e-12 * (1.0 + sd));
  }
}

TEST_CASE("aggregation is invariant to row order") {
  const ExperimentResult result = run_replicates(tiny_config());
  std::vector<MetricsRow> shuffled = result.rows;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto direct = aggregate_rows(result.rows);
  const auto reversed = aggregate_rows(shuffled);
  REQUIRE(direct.size() == reversed.size());
  for (const AggregateRow& agg : direct) {
    const auto match = std::find_if(
        reversed.begin(), reversed.end(), [&](const AggregateRow& other) {
          return other.method == agg.method && other.metric == agg.metric;
        });
    REQUIRE(match != reversed.end());
    CHECK(std::abs(agg.mean - match->mean) <=
          1e-12 * (1.0 + std::abs(agg.mean)));
    CHECK(std::abs(agg.sd - match->sd) <= 1e-12 * (1.0 + agg.sd));
  }
}

TEST_CASE("parallel execution reproduces the serial rows") {
  ExperimentConfig config = tiny_config();
  config.replicates = 4;
  const ExperimentResult serial = run_replicates(config);
  config.jobs = 4;
  const ExperimentResult parallel = run_replicates(config);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].method == parallel.rows[i].method);
    CHECK(serial.rows[i].replicate == parallel.rows[i].replicate);
    CHECK(serial.rows[i].l2_err == parallel.rows[i].l2_err);
    CHECK(serial.rows[i].pop_risk == parallel.rows[i].pop_risk);
    CHECK(serial.rows[i].lambda_tilde_used ==
          parallel.rows[i].lambda_tilde_used);
  }
}
