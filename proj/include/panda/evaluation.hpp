#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "panda/datagen.hpp"
#include "panda/model.hpp"
#include "panda/solver.hpp"
#include "panda/tuning.hpp"

namespace panda {

//! l1 and l2 norms of beta_hat - beta_star.
std::pair<double, double> estimation_errors(
    const Eigen::Ref<const Vector>& beta_hat,
    const Eigen::Ref<const Vector>& beta_star);

//! |tau_hat^2 - delta^2| / delta^2. Requires delta > 0.
double tau_relative_error(double tau_hat, double delta);

//! Fraction of the pooled test set the rule misclassifies.
double empirical_error(const LinearRule& rule, const Matrix& test0,
                       const Matrix& test1);

struct SelectionCounts {
  double tp = 0;
  double tn = 0;
  double precision = 1.0;  // 0/0 convention: nothing selected, nothing wrong
  double recall = 1.0;
};

//! Support recovery against the true direction: predicted support is
//! {j : |beta_hat_j| > threshold}, true support is {j : beta_star_j != 0}.
SelectionCounts variable_selection(const Eigen::Ref<const Vector>& beta_hat,
                                   const Eigen::Ref<const Vector>& beta_star,
                                   double threshold = 0.01);

//! Rank-based (Mann-Whitney) AUC of the rule's score beta'(z - alpha), with
//! ties counted one half. Class 1 is the positive class.
double auc(const LinearRule& rule, const Matrix& test0, const Matrix& test1);
double auc_from_scores(std::vector<double> scores0,
                       std::vector<double> scores1);

//! One simulation cell's outputs for a single replicate and method.
struct MetricsRow {
  int replicate = 0;
  std::string method;
  double c_used = 0.0;
  double lambda_tilde_used = 0.0;
  double lambda_used = 0.0;
  double l1_err = 0.0;
  double l2_err = 0.0;
  std::optional<double> tau_rel_err;
  double pop_risk = 0.0;
  double test_err = 0.0;
  double tp = 0.0;
  double tn = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double auc = 0.0;
  std::optional<bool> soc_active;
  std::string solver_status;
  int iterations = 0;
  double wall_time_s = 0.0;
  bool degenerate = false;  // beta_hat = 0; risk reported as 0.5
};

enum class ParameterMode { theoretical, practical, fixed };

std::string to_string(ParameterMode mode);
ParameterMode parameter_mode_from_string(const std::string& name);

//! Full synthetic experiment description: the population cell, the sample
//! sizes, which estimators, how to pick their parameters, and the seeds.
struct ExperimentConfig {
  SimSpec spec;
  std::vector<Method> methods{Method::PANDA};
  Eigen::Index n0 = 200, n1 = 200;
  Eigen::Index n_val = 200;   // per class
  Eigen::Index n_test = 200;  // per class
  int replicates = 1;
  TuneGrid grid = TuneGrid::standard();
  AdmmConfig admm;
  ParameterMode mode = ParameterMode::practical;
  double fixed_c = 20.0;
  double fixed_lambda_tilde = 1.0;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool emit_curve = false;
  int trace_stride = 0;  // > 0 records solver traces for replicate 0
  // Overrides the default per-replicate seeds (base seed + index); used by
  // determinism tests.
  std::optional<std::vector<std::uint64_t>> replicate_seeds;
};

struct AggregateRow {
  std::string method;
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;
  int count = 0;
};

struct ReplicateFailure {
  int replicate;
  std::string method;
  std::string message;
};

struct CurveRow {
  int replicate;
  std::string method;
  TuneCurvePoint point;
};

struct TraceRow {
  int replicate;
  std::string method;
  double lambda_tilde;
  TracePoint point;
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  std::vector<AggregateRow> aggregates;
  std::vector<ReplicateFailure> failures;
  std::vector<CurveRow> curve;
  std::vector<TraceRow> trace;
};

//! Run every replicate of an experiment (optionally in parallel), collect
//! per-replicate metric rows, and aggregate them (mean and sample standard
//! deviation with divisor R-1). Solver failures are recorded and excluded
//! from the aggregates. Output is identical for any job count.
ExperimentResult run_replicates(const ExperimentConfig& config);

//! Aggregation used by run_replicates, exposed for oracle tests: mean and
//! sample sd per method and metric, in a fixed metric order.
std::vector<AggregateRow> aggregate_rows(const std::vector<MetricsRow>& rows);

}  // namespace panda
