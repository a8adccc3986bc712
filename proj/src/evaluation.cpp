#include "panda/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

namespace panda {

namespace {

constexpr std::uint64_t kStreamModel = 101;
constexpr std::uint64_t kStreamTrain = 102;
constexpr std::uint64_t kStreamVal = 103;
constexpr std::uint64_t kStreamTest = 104;

double risk_or_half(const LinearRule& rule, const GaussianModel& model,
                    bool* degenerate) {
  if (rule.beta.isZero(0.0)) {
    if (degenerate != nullptr) *degenerate = true;
    return 0.5;
  }
  return population_risk(rule, model);
}

}  // namespace

std::pair<double, double> estimation_errors(
    const Eigen::Ref<const Vector>& beta_hat,
    const Eigen::Ref<const Vector>& beta_star) {
  if (beta_hat.size() != beta_star.size()) {
    throw InvalidInput("direction lengths differ");
  }
  const Vector diff = beta_hat - beta_star;
  return {diff.lpNorm<1>(), diff.norm()};
}

double tau_relative_error(double tau_hat, double delta) {
  if (!(delta > 0.0)) throw InvalidInput("delta must be positive");
  return std::abs(tau_hat * tau_hat - delta * delta) / (delta * delta);
}

double empirical_error(const LinearRule& rule, const Matrix& test0,
                       const Matrix& test1) {
  const Eigen::Index total = test0.rows() + test1.rows();
  if (total < 1) throw InvalidInput("empty test set");
  Eigen::Index wrong = 0;
  for (Eigen::Index i = 0; i < test0.rows(); ++i) {
    wrong += classify(rule, test0.row(i).transpose()) == 1 ? 1 : 0;
  }
  for (Eigen::Index i = 0; i < test1.rows(); ++i) {
    wrong += classify(rule, test1.row(i).transpose()) == 0 ? 1 : 0;
  }
  return static_cast<double>(wrong) / static_cast<double>(total);
}

SelectionCounts variable_selection(const Eigen::Ref<const Vector>& beta_hat,
                                   const Eigen::Ref<const Vector>& beta_star,
                                   double threshold) {
  if (beta_hat.size() != beta_star.size()) {
    throw InvalidInput("direction lengths differ");
  }
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (Eigen::Index j = 0; j < beta_hat.size(); ++j) {
    const bool selected = std::abs(beta_hat(j)) > threshold;
    const bool truth = beta_star(j) != 0.0;
    if (selected && truth) ++tp;
    else if (selected && !truth) ++fp;
    else if (!selected && truth) ++fn;
    else ++tn;
  }
  SelectionCounts counts;
  counts.tp = tp;
  counts.tn = tn;
  counts.precision = (tp + fp) > 0 ? tp / (tp + fp) : 1.0;
  counts.recall = (tp + fn) > 0 ? tp / (tp + fn) : 1.0;
  return counts;
}

double auc_from_scores(std::vector<double> scores0,
                       std::vector<double> scores1) {
  if (scores0.empty() || scores1.empty()) {
    throw InvalidInput("both classes need at least one score");
  }
  const std::size_t n0 = scores0.size(), n1 = scores1.size();
  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(n0 + n1);
  for (double score : scores0) pooled.emplace_back(score, 0);
  for (double score : scores1) pooled.emplace_back(score, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Midranks over tie groups, summed for the positive class.
  double rank_sum1 = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second == 1) rank_sum1 += midrank;
    }
    i = j;
  }
  const double u1 =
      rank_sum1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1) / 2.0;
  return u1 / (static_cast<double>(n0) * static_cast<double>(n1));
}

double auc(const LinearRule& rule, const Matrix& test0, const Matrix& test1) {
  if (test0.rows() < 1 || test1.rows() < 1) {
    throw InvalidInput("both classes need at least one test sample");
  }
  std::vector<double> scores0(test0.rows()), scores1(test1.rows());
  for (Eigen::Index i = 0; i < test0.rows(); ++i) {
    scores0[i] = rule.beta.dot(test0.row(i).transpose() - rule.alpha);
  }
  for (Eigen::Index i = 0; i < test1.rows(); ++i) {
    scores1[i] = rule.beta.dot(test1.row(i).transpose() - rule.alpha);
  }
  return auc_from_scores(std::move(scores0), std::move(scores1));
}

std::string to_string(ParameterMode mode) {
  switch (mode) {
    case ParameterMode::theoretical: return "theoretical";
    case ParameterMode::practical: return "practical";
    case ParameterMode::fixed: return "fixed";
  }
  return "unknown";
}

ParameterMode parameter_mode_from_string(const std::string& name) {
  if (name == "theoretical") return ParameterMode::theoretical;
  if (name == "practical") return ParameterMode::practical;
  if (name == "fixed") return ParameterMode::fixed;
  throw InvalidInput("unknown parameter mode: " + name);
}

namespace {

struct ReplicateOutput {
  std::vector<MetricsRow> rows;
  std::vector<ReplicateFailure> failures;
  std::vector<CurveRow> curve;
  std::vector<TraceRow> trace;
};

MetricsRow evaluate_rule(const LinearRule& rule, const GaussianModel& model,
                         const Matrix& test0, const Matrix& test1) {
  MetricsRow row;
  auto [l1, l2] = estimation_errors(rule.beta, model.beta_star());
  row.l1_err = l1;
  row.l2_err = l2;
  row.pop_risk = risk_or_half(rule, model, &row.degenerate);
  row.test_err = empirical_error(rule, test0, test1);
  const SelectionCounts counts = variable_selection(rule.beta,
                                                    model.beta_star());
  row.tp = counts.tp;
  row.tn = counts.tn;
  row.precision = counts.precision;
  row.recall = counts.recall;
  row.auc = rule.beta.isZero(0.0) ? 0.5 : auc(rule, test0, test1);
  return row;
}

ReplicateOutput run_one_replicate(const ExperimentConfig& config,
                                  int replicate, std::uint64_t rep_seed) {
  ReplicateOutput out;

  SimSpec spec = config.spec;
  spec.seed = derive_seed(rep_seed, kStreamModel);
  const GaussianModel model = build_model(spec);

  const auto [train0, train1] =
      sample(model, config.n0, config.n1, derive_seed(rep_seed, kStreamTrain));
  const auto [val0, val1] = sample(model, config.n_val, config.n_val,
                                   derive_seed(rep_seed, kStreamVal));
  const auto [test0, test1] = sample(model, config.n_test, config.n_test,
                                     derive_seed(rep_seed, kStreamTest));
  const SuffStats stats = compute_suff_stats(train0, train1);

  for (Method method : config.methods) {
    const auto started = std::chrono::steady_clock::now();
    try {
      MetricsRow row;
      if (method == Method::Bayes) {
        LinearRule rule{model.mu_m(), model.beta_star()};
        row = evaluate_rule(rule, model, test0, test1);
        row.solver_status = "closed_form";
      } else if (config.mode == ParameterMode::practical) {
        AdmmConfig admm = config.admm;
        if (config.trace_stride > 0 && replicate == 0) {
          admm.trace_stride = config.trace_stride;
        }
        TuneResult tuned =
            grid_search(stats, val0, val1, method, config.grid, admm,
                        /*warm_start=*/true,
                        config.emit_curve ? &model : nullptr);
        row = evaluate_rule(tuned.best_fit.rule, model, test0, test1);
        row.c_used = tuned.best_c;
        row.lambda_tilde_used = tuned.best_lambda_tilde;
        row.lambda_used = tuned.best_fit.lambda_used;
        row.tau_rel_err =
            tuned.best_fit.tau_hat.has_value() && model.delta() > 0.0
                ? std::optional<double>(tau_relative_error(
                      *tuned.best_fit.tau_hat, model.delta()))
                : std::nullopt;
        row.soc_active = tuned.best_fit.soc_active;
        row.solver_status = to_string(tuned.best_fit.solver_diag.status);
        row.iterations = tuned.best_fit.solver_diag.iterations;
        if (config.emit_curve) {
          for (const TuneCurvePoint& point : tuned.curve) {
            out.curve.push_back({replicate, to_string(method), point});
          }
        }
        if (config.trace_stride > 0 && replicate == 0) {
          for (const TracePoint& point : tuned.best_fit.solver_diag.trace) {
            out.trace.push_back({replicate, to_string(method),
                                 tuned.best_lambda_tilde, point});
          }
        }
      } else {
        double c, lambda, lambda_tilde;
        if (config.mode == ParameterMode::theoretical) {
          std::tie(c, lambda) = theoretical_defaults(stats);
          lambda_tilde = 20.0;
        } else {
          c = config.fixed_c;
          lambda_tilde = config.fixed_lambda_tilde;
          lambda = lambda_tilde * stats.sqrt_log_p_over_n();
        }
        AdmmConfig admm = config.admm;
        if (config.trace_stride > 0 && replicate == 0) {
          admm.trace_stride = config.trace_stride;
        }
        FitResult fit = fit_method(method, stats, c, lambda, admm);
        row = evaluate_rule(fit.rule, model, test0, test1);
        row.c_used = method == Method::PANDA ? c : 0.0;
        row.lambda_tilde_used = lambda_tilde;
        row.lambda_used = lambda;
        row.tau_rel_err = fit.tau_hat.has_value() && model.delta() > 0.0
                              ? std::optional<double>(tau_relative_error(
                                    *fit.tau_hat, model.delta()))
                              : std::nullopt;
        row.soc_active = fit.soc_active;
        row.solver_status = to_string(fit.solver_diag.status);
        row.iterations = fit.solver_diag.iterations;
        if (config.trace_stride > 0 && replicate == 0) {
          for (const TracePoint& point : fit.solver_diag.trace) {
            out.trace.push_back(
                {replicate, to_string(method), lambda_tilde, point});
          }
        }
      }
      row.replicate = replicate;
      row.method = to_string(method);
      row.wall_time_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - started)
                            .count();
      out.rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      out.failures.push_back({replicate, to_string(method), e.what()});
    }
  }
  return out;
}

}  // namespace

std::vector<AggregateRow> aggregate_rows(const std::vector<MetricsRow>& rows) {
  struct Entry {
    std::string metric;
    std::function<std::optional<double>(const MetricsRow&)> get;
  };
  const std::vector<Entry> entries{
      {"l1_err", [](const MetricsRow& r) { return std::optional(r.l1_err); }},
      {"l2_err", [](const MetricsRow& r) { return std::optional(r.l2_err); }},
      {"tau_rel_err", [](const MetricsRow& r) { return r.tau_rel_err; }},
      {"pop_risk", [](const MetricsRow& r) { return std::optional(r.pop_risk); }},
      {"test_err", [](const MetricsRow& r) { return std::optional(r.test_err); }},
      {"tp", [](const MetricsRow& r) { return std::optional(r.tp); }},
      {"tn", [](const MetricsRow& r) { return std::optional(r.tn); }},
      {"precision",
       [](const MetricsRow& r) { return std::optional(r.precision); }},
      {"recall", [](const MetricsRow& r) { return std::optional(r.recall); }},
      {"auc", [](const MetricsRow& r) { return std::optional(r.auc); }},
      {"wall_time_s",
       [](const MetricsRow& r) { return std::optional(r.wall_time_s); }},
  };

  // Methods in first-appearance order keeps the output deterministic.
  std::vector<std::string> methods;
  for (const MetricsRow& row : rows) {
    if (std::find(methods.begin(), methods.end(), row.method) ==
        methods.end()) {
      methods.push_back(row.method);
    }
  }

  std::vector<AggregateRow> aggregates;
  for (const std::string& method : methods) {
    for (const Entry& entry : entries) {
      std::vector<double> values;
      for (const MetricsRow& row : rows) {
        if (row.method != method) continue;
        if (auto value = entry.get(row)) values.push_back(*value);
      }
      if (values.empty()) continue;
      const double mean =
          std::accumulate(values.begin(), values.end(), 0.0) /
          static_cast<double>(values.size());
      double sd = 0.0;
      if (values.size() > 1) {
        double ss = 0.0;
        for (double value : values) ss += (value - mean) * (value - mean);
        sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
      }
      aggregates.push_back({method, entry.metric, mean, sd,
                            static_cast<int>(values.size())});
    }
  }
  return aggregates;
}

ExperimentResult run_replicates(const ExperimentConfig& config) {
  if (config.replicates < 1) throw InvalidInput("need at least one replicate");
  if (config.methods.empty()) throw InvalidInput("need at least one method");
  if (config.replicate_seeds &&
      config.replicate_seeds->size() !=
          static_cast<std::size_t>(config.replicates)) {
    throw InvalidInput("replicate seed override has wrong length");
  }

  std::vector<ReplicateOutput> outputs(config.replicates);
  auto seed_of = [&](int rep) {
    return config.replicate_seeds
               ? (*config.replicate_seeds)[rep]
               : config.seed + static_cast<std::uint64_t>(rep);
  };

  const int jobs = std::max(1, std::min(config.jobs, config.replicates));
  if (jobs == 1) {
    for (int rep = 0; rep < config.replicates; ++rep) {
      outputs[rep] = run_one_replicate(config, rep, seed_of(rep));
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int t = 0; t < jobs; ++t) {
      workers.emplace_back([&] {
        for (int rep = next.fetch_add(1); rep < config.replicates;
             rep = next.fetch_add(1)) {
          outputs[rep] = run_one_replicate(config, rep, seed_of(rep));
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
  }

  ExperimentResult result;
  for (ReplicateOutput& out : outputs) {
    for (MetricsRow& row : out.rows) result.rows.push_back(std::move(row));
    for (ReplicateFailure& failure : out.failures) {
      result.failures.push_back(std::move(failure));
    }
    for (CurveRow& row : out.curve) result.curve.push_back(std::move(row));
    for (TraceRow& row : out.trace) result.trace.push_back(std::move(row));
  }
  result.aggregates = aggregate_rows(result.rows);
  return result;
}

}  // namespace panda
