#include "panda/cli_commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "panda/oracle.hpp"

namespace panda::cli {

namespace {

using nlohmann::json;

std::string fmt(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

std::string fmt_opt(const std::optional<double>& value) {
  return value ? fmt(*value) : "";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw InvalidInput("cannot write " + path);
  return file;
}

std::string manifest_path(const std::string& out_prefix) {
  const std::filesystem::path prefix(out_prefix);
  std::filesystem::path dir = prefix.parent_path();
  if (dir.empty()) dir = ".";
  return (dir / "run_manifest.json").string();
}

void write_manifest(const std::string& out_prefix, const json& resolved) {
  auto file = open_out(manifest_path(out_prefix));
  file << resolved.dump(2) << "\n";
}

json load_json(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw InvalidInput("cannot open config " + path);
  json parsed;
  try {
    file >> parsed;
  } catch (const json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  if (!parsed.is_object()) throw InvalidInput(path + ": expected an object");
  return parsed;
}

void check_command(const json& config, const std::string& path,
                   const std::string& command) {
  if (config.contains("command") &&
      config.at("command").get<std::string>() != command) {
    throw InvalidInput(path + " is a config for '" +
                       config.at("command").get<std::string>() +
                       "', not '" + command + "'");
  }
}

//! Pulls known keys out of a flat JSON object, complaining about leftovers.
class KeyReader {
 public:
  KeyReader(const json& config, std::string path)
      : config_(config), path_(std::move(path)) {
    for (const auto& item : config_.items()) remaining_.insert(item.key());
    remaining_.erase("command");
  }

  template <typename T>
  void get(const char* key, T& target) {
    if (!config_.contains(key)) return;
    remaining_.erase(key);
    try {
      target = config_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw InvalidInput(path_ + ": key '" + std::string(key) + "': " +
                         e.what());
    }
  }

  void get_string(const char* key, std::string& target) { get(key, target); }

  void finish() const {
    if (!remaining_.empty()) {
      throw InvalidInput(path_ + ": unknown key '" + *remaining_.begin() +
                         "'");
    }
  }

 private:
  const json& config_;
  std::string path_;
  std::set<std::string> remaining_;
};

void read_common(KeyReader& reader, CommonOptions& common) {
  reader.get("seed", common.seed);
  reader.get("jobs", common.jobs);
  reader.get_string("out", common.out);
}

void read_admm(KeyReader& reader, AdmmConfig& admm) {
  reader.get("admm_rho", admm.rho);
  reader.get("admm_eta", admm.eta);
  reader.get("admm_max_iters", admm.max_iters);
  reader.get("admm_primal_tol", admm.primal_tol);
  reader.get("admm_change_tol", admm.change_tol);
}

json admm_to_json(const AdmmConfig& admm) {
  return json{{"admm_rho", admm.rho},
              {"admm_eta", admm.eta},
              {"admm_max_iters", admm.max_iters},
              {"admm_primal_tol", admm.primal_tol},
              {"admm_change_tol", admm.change_tol}};
}

std::vector<std::string> method_names(const std::vector<Method>& methods) {
  std::vector<std::string> names;
  for (Method m : methods) names.push_back(to_string(m));
  return names;
}

json simulate_to_json(const SimulateOptions& o, const std::string& command) {
  json j = admm_to_json(o.admm);
  j["command"] = command;
  j["seed"] = o.common.seed;
  j["jobs"] = o.common.jobs;
  j["out"] = o.common.out;
  j["model"] = to_string(o.model);
  j["p"] = o.p;
  j["s"] = o.s;
  j["eta_scale"] = o.eta_scale;
  j["methods"] = method_names(o.methods);
  j["n0"] = o.n0;
  j["n1"] = o.n1;
  j["n_val"] = o.n_val;
  j["n_test"] = o.n_test;
  j["replicates"] = o.replicates;
  j["mode"] = to_string(o.mode);
  j["c"] = o.c;
  j["lambda_tilde"] = o.lambda_tilde;
  j["c_values"] = o.c_values;
  j["grid_min"] = o.grid_min;
  j["grid_max"] = o.grid_max;
  j["grid_step"] = o.grid_step;
  j["emit_curve"] = o.emit_curve;
  j["trace_stride"] = o.trace_stride;
  return j;
}

TuneGrid make_grid(double lo, double hi, double step,
                   const std::vector<double>& c_values, double c) {
  if (!(lo > 0.0) || !(step > 0.0) || hi < lo) {
    throw InvalidInput("tuning grid bounds must satisfy 0 < min <= max");
  }
  TuneGrid grid;
  grid.lambda_tilde_values.clear();
  for (double value = lo; value <= hi + 1e-12; value += step) {
    grid.lambda_tilde_values.push_back(value);
  }
  grid.c_values = c_values.empty() ? std::vector<double>{c} : c_values;
  grid.validate();
  return grid;
}

ExperimentConfig experiment_from(const SimulateOptions& o) {
  ExperimentConfig config;
  config.spec = SimSpec{o.model, o.p, o.s, o.eta_scale, 0};
  config.methods = o.methods;
  config.n0 = o.n0;
  config.n1 = o.n1;
  config.n_val = o.n_val;
  config.n_test = o.n_test;
  config.replicates = o.replicates;
  config.grid = make_grid(o.grid_min, o.grid_max, o.grid_step, o.c_values, o.c);
  config.admm = o.admm;
  config.mode = o.mode;
  config.fixed_c = o.c;
  config.fixed_lambda_tilde = o.lambda_tilde;
  config.seed = o.common.seed;
  config.jobs = o.common.jobs;
  config.emit_curve = o.emit_curve;
  config.trace_stride = o.trace_stride;
  return config;
}

const char* kRowsHeader =
    "replicate,method,model,p,s,n0,n1,mode,c,lambda_tilde,lambda,l1_err,"
    "l2_err,tau_rel_err,pop_risk,test_err,tp,tn,precision,recall,auc,"
    "soc_active,degenerate,solver_status,iterations";
const char* kSummaryHeader = "method,metric,mean,sd,count";
const char* kCurveHeader = "replicate,method,c,lambda_tilde,val_error,pop_risk";
const char* kTraceHeader =
    "replicate,method,lambda_tilde,iteration,primal_residual,objective";

void write_rows_csv(const std::string& path, const SimulateOptions& o,
                    const std::vector<MetricsRow>& rows) {
  auto file = open_out(path);
  file << kRowsHeader << "\n";
  for (const MetricsRow& row : rows) {
    file << row.replicate << ',' << row.method << ',' << to_string(o.model)
         << ',' << o.p << ',' << o.s << ',' << o.n0 << ',' << o.n1 << ','
         << to_string(o.mode) << ',' << fmt(row.c_used) << ','
         << fmt(row.lambda_tilde_used) << ',' << fmt(row.lambda_used) << ','
         << fmt(row.l1_err) << ',' << fmt(row.l2_err) << ','
         << fmt_opt(row.tau_rel_err) << ',' << fmt(row.pop_risk) << ','
         << fmt(row.test_err) << ',' << fmt(row.tp) << ',' << fmt(row.tn)
         << ',' << fmt(row.precision) << ',' << fmt(row.recall) << ','
         << fmt(row.auc) << ','
         << (row.soc_active ? (*row.soc_active ? "1" : "0") : "") << ','
         << (row.degenerate ? 1 : 0) << ',' << row.solver_status << ','
         << row.iterations << "\n";
  }
}

void write_summary_csv(const std::string& path,
                       const ExperimentResult& result) {
  auto file = open_out(path);
  file << kSummaryHeader << "\n";
  for (const AggregateRow& agg : result.aggregates) {
    file << agg.method << ',' << agg.metric << ',' << fmt(agg.mean) << ','
         << fmt(agg.sd) << ',' << agg.count << "\n";
  }
  // Per-method failure counts keep excluded replicates visible.
  std::map<std::string, int> failures;
  for (const ReplicateFailure& failure : result.failures) {
    ++failures[failure.method];
  }
  for (const auto& [method, count] : failures) {
    file << method << ",failures," << count << ",0," << count << "\n";
  }
}

void write_curve_csv(const std::string& path,
                     const std::vector<CurveRow>& curve) {
  auto file = open_out(path);
  file << kCurveHeader << "\n";
  for (const CurveRow& row : curve) {
    file << row.replicate << ',' << row.method << ',' << fmt(row.point.c)
         << ',' << fmt(row.point.lambda_tilde) << ','
         << fmt(row.point.val_error) << ',' << fmt_opt(row.point.pop_risk)
         << "\n";
  }
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& trace) {
  auto file = open_out(path);
  file << kTraceHeader << "\n";
  for (const TraceRow& row : trace) {
    file << row.replicate << ',' << row.method << ',' << fmt(row.lambda_tilde)
         << ',' << row.point.iteration << ','
         << fmt(row.point.primal_residual) << ',' << fmt(row.point.objective)
         << "\n";
  }
}

int run_simulate_like(const SimulateOptions& options,
                      const std::string& command) {
  const ExperimentConfig config = experiment_from(options);
  log(LogLevel::info, command + ": model=" + to_string(options.model) +
                          " p=" + std::to_string(options.p) + " s=" +
                          std::to_string(options.s) + " replicates=" +
                          std::to_string(options.replicates));
  const auto started = std::chrono::steady_clock::now();
  const ExperimentResult result = run_replicates(config);
  const double elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - started)
                             .count();

  for (const ReplicateFailure& failure : result.failures) {
    log(LogLevel::warn, "replicate " + std::to_string(failure.replicate) +
                            " " + failure.method + " failed: " +
                            failure.message);
  }
  if (result.rows.empty()) {
    log(LogLevel::error, "every fit failed");
    return 3;
  }

  const std::string prefix = options.common.out;
  write_rows_csv(prefix + "_rows.csv", options, result.rows);
  write_summary_csv(prefix + "_summary.csv", result);
  if (options.emit_curve) write_curve_csv(prefix + "_curve.csv", result.curve);
  if (options.trace_stride > 0) {
    write_trace_csv(prefix + "_trace.csv", result.trace);
  }
  write_manifest(prefix, simulate_to_json(options, command));

  if (command == "tune") {
    for (const MetricsRow& row : result.rows) {
      if (row.method == "bayes") continue;
      std::cout << "replicate " << row.replicate << " " << row.method
                << " best_lambda_tilde " << fmt(row.lambda_tilde_used)
                << " val-selected risk " << fmt(row.pop_risk) << "\n";
    }
  } else {
    for (const AggregateRow& agg : result.aggregates) {
      if (agg.metric == "pop_risk" || agg.metric == "l2_err") {
        std::cout << agg.method << " " << agg.metric << " mean "
                  << fmt(agg.mean) << " sd " << fmt(agg.sd) << " over "
                  << agg.count << " replicates\n";
      }
    }
  }
  log(LogLevel::info,
      command + " finished in " + fmt(elapsed) + "s; wrote " + prefix +
          "_rows.csv");
  return 0;
}

}  // namespace

LogLevel log_level() {
  const char* env = std::getenv("PANDA_LOG");
  if (env == nullptr) return LogLevel::info;
  const std::string value(env);
  if (value == "debug") return LogLevel::debug;
  if (value == "info") return LogLevel::info;
  if (value == "warn") return LogLevel::warn;
  if (value == "error") return LogLevel::error;
  if (value == "quiet") return LogLevel::quiet;
  return LogLevel::info;
}

void log(LogLevel level, const std::string& message) {
  static const LogLevel threshold = log_level();
  if (level < threshold) return;
  static const char* names[] = {"debug", "info", "warn", "error"};
  std::cerr << "[panda] " << names[static_cast<int>(level)] << ": " << message
            << "\n";
}

void apply_config_file(const std::string& path, const std::string& command,
                       SimulateOptions& options) {
  const json config = load_json(path);
  check_command(config, path, command);
  KeyReader reader(config, path);
  read_common(reader, options.common);
  read_admm(reader, options.admm);

  std::string model = to_string(options.model);
  reader.get_string("model", model);
  options.model = sim_model_from_string(model);
  reader.get("p", options.p);
  reader.get("s", options.s);
  reader.get("eta_scale", options.eta_scale);

  std::vector<std::string> methods = method_names(options.methods);
  reader.get("methods", methods);
  options.methods.clear();
  for (const std::string& name : methods) {
    options.methods.push_back(method_from_string(name));
  }

  reader.get("n0", options.n0);
  reader.get("n1", options.n1);
  reader.get("n_val", options.n_val);
  reader.get("n_test", options.n_test);
  reader.get("replicates", options.replicates);

  std::string mode = to_string(options.mode);
  reader.get_string("mode", mode);
  options.mode = parameter_mode_from_string(mode);
  reader.get("c", options.c);
  reader.get("lambda_tilde", options.lambda_tilde);
  reader.get("c_values", options.c_values);
  reader.get("grid_min", options.grid_min);
  reader.get("grid_max", options.grid_max);
  reader.get("grid_step", options.grid_step);
  reader.get("emit_curve", options.emit_curve);
  reader.get("trace_stride", options.trace_stride);
  reader.finish();
}

void apply_config_file(const std::string& path, const std::string& command,
                       FitOptions& options) {
  const json config = load_json(path);
  check_command(config, path, command);
  KeyReader reader(config, path);
  read_common(reader, options.common);
  read_admm(reader, options.admm);

  reader.get_string("data", options.data_path);
  reader.get_string("label_column", options.label_column);
  std::string delimiter(1, options.delimiter);
  reader.get_string("delimiter", delimiter);
  if (delimiter.size() != 1) throw InvalidInput("delimiter must be one char");
  options.delimiter = delimiter[0];
  reader.get("filter_fraction", options.filter_fraction);
  reader.get("select_m", options.select_m);

  std::vector<Eigen::Index> split;
  reader.get("split", split);
  if (!split.empty()) {
    if (split.size() != 6) {
      throw InvalidInput("split must have 6 counts: train0,train1,val0,val1,"
                         "test0,test1");
    }
    options.split = SplitCounts{split[0], split[1], split[2],
                                split[3], split[4], split[5]};
  }

  std::string method = to_string(options.method);
  reader.get_string("method", method);
  options.method = method_from_string(method);
  std::string mode = to_string(options.mode);
  reader.get_string("mode", mode);
  options.mode = parameter_mode_from_string(mode);
  reader.get("c", options.c);
  reader.get("lambda_tilde", options.lambda_tilde);
  reader.get("grid_min", options.grid_min);
  reader.get("grid_max", options.grid_max);
  reader.get("grid_step", options.grid_step);
  reader.finish();
}

void apply_config_file(const std::string& path, const std::string& command,
                       OracleCheckOptions& options) {
  const json config = load_json(path);
  check_command(config, path, command);
  KeyReader reader(config, path);
  read_common(reader, options.common);
  read_admm(reader, options.admm);
  reader.get("n_instances", options.n_instances);
  reader.get("max_p", options.max_p);
  reader.get("gap_tol", options.gap_tol);
  reader.get("violation_tol", options.violation_tol);
  reader.finish();
}

void apply_config_file(const std::string& path, const std::string& command,
                       KClassOptions& options) {
  const json config = load_json(path);
  check_command(config, path, command);
  KeyReader reader(config, path);
  read_common(reader, options.common);
  read_admm(reader, options.admm);
  std::string model = to_string(options.model);
  reader.get_string("model", model);
  options.model = sim_model_from_string(model);
  reader.get("p", options.p);
  reader.get("s", options.s);
  reader.get("eta_scale", options.eta_scale);
  reader.get("k", options.num_classes);
  reader.get("n", options.n);
  reader.get("n_test", options.n_test);
  std::string mode = to_string(options.mode);
  reader.get_string("mode", mode);
  options.mode = parameter_mode_from_string(mode);
  reader.get("c", options.c);
  reader.get("lambda_tilde", options.lambda_tilde);
  reader.finish();
}

int cmd_simulate(const SimulateOptions& options) {
  return run_simulate_like(options, "simulate");
}

int cmd_tune(const SimulateOptions& options) {
  SimulateOptions tuned = options;
  tuned.emit_curve = true;
  tuned.mode = ParameterMode::practical;
  return run_simulate_like(tuned, "tune");
}

int cmd_fit(const FitOptions& options) {
  const std::string prefix = options.common.out;
  if (options.data_path.empty()) throw InvalidInput("no input CSV given");

  log(LogLevel::info, "stage 1/6: load " + options.data_path);
  RealDataset data =
      load_csv(options.data_path, options.label_column, options.delimiter);
  log(LogLevel::info,
      "stage 1/6: loaded n=" + std::to_string(data.n()) + " (class0=" +
          std::to_string(data.count_label(0)) + ", class1=" +
          std::to_string(data.count_label(1)) + "), p=" +
          std::to_string(data.p()));

  RealDataset filtered = variance_quantile_filter(data, options.filter_fraction);
  log(LogLevel::info,
      "stage 2/6: variance filter kept p=" + std::to_string(filtered.p()) +
          " of " + std::to_string(data.p()));

  SplitCounts counts;
  if (options.split) {
    counts = *options.split;
  } else {
    const auto proportional = [](Eigen::Index n) {
      const Eigen::Index train = (n * 6) / 10;
      const Eigen::Index val = n / 5;
      return std::tuple{train, val, n - train - val};
    };
    auto [tr0, va0, te0] = proportional(filtered.count_label(0));
    auto [tr1, va1, te1] = proportional(filtered.count_label(1));
    counts = SplitCounts{tr0, tr1, va0, va1, te0, te1};
  }
  SplitResult split = stratified_split(filtered, counts, options.common.seed);
  log(LogLevel::info,
      "stage 3/6: split train=" + std::to_string(split.train.n()) + " val=" +
          std::to_string(split.val.n()) + " test=" +
          std::to_string(split.test.n()) + " (seed " +
          std::to_string(options.common.seed) + ")");

  const Eigen::Index m = std::min<Eigen::Index>(options.select_m,
                                                split.train.p());
  std::vector<Eigen::Index> selected = t_test_select(split.train, m);
  std::sort(selected.begin(), selected.end());
  const RealDataset train = select_features(split.train, selected);
  const RealDataset val = select_features(split.val, selected);
  const RealDataset test = select_features(split.test, selected);
  log(LogLevel::info, "stage 4/6: t-test selected m=" + std::to_string(m) +
                          " features on the training split");

  const SuffStats stats =
      compute_suff_stats(train.class_rows(0), train.class_rows(1));
  FitResult fit;
  double lambda_tilde_used = options.lambda_tilde;
  if (options.mode == ParameterMode::practical) {
    const TuneGrid grid = make_grid(options.grid_min, options.grid_max,
                                    options.grid_step, {}, options.c);
    TuneResult tuned = grid_search(stats, val.class_rows(0), val.class_rows(1),
                                   options.method, grid, options.admm);
    fit = std::move(tuned.best_fit);
    lambda_tilde_used = tuned.best_lambda_tilde;
    log(LogLevel::info, "stage 5/6: tuned " + to_string(options.method) +
                            ", best lambda_tilde=" + fmt(lambda_tilde_used));
  } else {
    double c = options.c, lambda;
    if (options.mode == ParameterMode::theoretical) {
      std::tie(c, lambda) = theoretical_defaults(stats);
      lambda_tilde_used = 20.0;
    } else {
      lambda = options.lambda_tilde * stats.sqrt_log_p_over_n();
    }
    fit = fit_method(options.method, stats, c, lambda, options.admm);
    log(LogLevel::info, "stage 5/6: fitted " + to_string(options.method) +
                            " at lambda=" + fmt(lambda));
  }

  const double test_error =
      empirical_error(fit.rule, test.class_rows(0), test.class_rows(1));
  log(LogLevel::info, "stage 6/6: test error " + fmt(test_error));

  {
    auto file = open_out(prefix + "_beta.csv");
    file << "feature,coefficient\n";
    for (Eigen::Index j = 0; j < fit.beta_hat.size(); ++j) {
      file << train.feature_names[j] << ',' << fmt(fit.beta_hat(j)) << "\n";
    }
  }
  {
    auto file = open_out(prefix + "_split.jsonl");
    const auto dump = [&file](const char* name,
                              const std::vector<Eigen::Index>& rows) {
      json line{{"split", name}, {"rows", rows}};
      file << line.dump() << "\n";
    };
    dump("train", split.train_rows);
    dump("val", split.val_rows);
    dump("test", split.test_rows);
  }

  json manifest = admm_to_json(options.admm);
  manifest["command"] = "fit";
  manifest["seed"] = options.common.seed;
  manifest["jobs"] = options.common.jobs;
  manifest["out"] = prefix;
  manifest["data"] = options.data_path;
  manifest["label_column"] = options.label_column;
  manifest["delimiter"] = std::string(1, options.delimiter);
  manifest["filter_fraction"] = options.filter_fraction;
  manifest["select_m"] = options.select_m;
  manifest["split"] = std::vector<Eigen::Index>{counts.train0, counts.train1,
                                                counts.val0, counts.val1,
                                                counts.test0, counts.test1};
  manifest["method"] = to_string(options.method);
  manifest["mode"] = to_string(options.mode);
  manifest["c"] = options.c;
  manifest["lambda_tilde"] = options.lambda_tilde;
  manifest["grid_min"] = options.grid_min;
  manifest["grid_max"] = options.grid_max;
  manifest["grid_step"] = options.grid_step;
  write_manifest(prefix, manifest);

  std::cout << "test_error " << fmt(test_error) << "\n";
  return 0;
}

int cmd_oracle_check(const OracleCheckOptions& options) {
  AdmmConfig cfg = options.admm;
  OracleCheckReport report = run_oracle_battery(
      options.n_instances, options.max_p, options.common.seed, cfg);

  std::map<std::string, std::pair<double, double>> per_method;
  for (const OracleCheckRow& row : report.rows) {
    auto& [gap, violation] = per_method[row.method];
    gap = std::max(gap, row.rel_gap);
    violation = std::max(violation, row.violation);
  }
  for (const auto& [method, worst] : per_method) {
    std::cout << method << " max_rel_gap " << fmt(worst.first)
              << " max_violation " << fmt(worst.second) << "\n";
  }
  std::cout << "overall instances " << report.instances << " max_rel_gap "
            << fmt(report.max_rel_gap) << " max_violation "
            << fmt(report.max_violation) << "\n";

  json manifest = admm_to_json(options.admm);
  manifest["command"] = "oracle-check";
  manifest["seed"] = options.common.seed;
  manifest["jobs"] = options.common.jobs;
  manifest["out"] = options.common.out;
  manifest["n_instances"] = options.n_instances;
  manifest["max_p"] = options.max_p;
  manifest["gap_tol"] = options.gap_tol;
  manifest["violation_tol"] = options.violation_tol;
  write_manifest(options.common.out, manifest);

  if (!report.pass(options.gap_tol, options.violation_tol)) {
    log(LogLevel::error, "solver-oracle gap beyond thresholds");
    return 1;
  }
  return 0;
}

int cmd_kclass(const KClassOptions& options) {
  if (options.mode == ParameterMode::practical) {
    throw InvalidInput("kclass supports fixed or theoretical parameters");
  }
  SimSpec spec{options.model, options.p, options.s, options.eta_scale,
               derive_seed(options.common.seed, 7)};
  const GaussianModel base = build_model(spec);
  const std::vector<Vector> means =
      kclass_means(base, spec, options.num_classes);

  std::vector<Matrix> train(options.num_classes);
  std::vector<Matrix> test(options.num_classes);
  for (int k = 0; k < options.num_classes; ++k) {
    train[k] = sample_class(base, means[k], options.n,
                            derive_seed(options.common.seed, 100 + k));
    test[k] = sample_class(base, means[k], options.n_test,
                           derive_seed(options.common.seed, 200 + k));
  }

  // Shared statistics for the parameter formulas.
  const double rate =
      std::sqrt(std::log(static_cast<double>(options.p)) /
                static_cast<double>(options.n));
  const double lambda = options.mode == ParameterMode::theoretical
                            ? 20.0 * rate
                            : options.lambda_tilde * rate;
  std::vector<double> c_list;
  for (int k = 1; k < options.num_classes; ++k) {
    if (options.mode == ParameterMode::theoretical) {
      Vector mu_hat_1 = train[0].colwise().mean();
      Vector mu_hat_k = train[k].colwise().mean();
      Matrix pooled = Matrix::Zero(options.p, options.p);
      Eigen::Index total = 0;
      for (int j = 0; j < options.num_classes; ++j) {
        Vector mean = train[j].colwise().mean();
        Matrix centered = train[j].rowwise() - mean.transpose();
        pooled += centered.transpose() * centered;
        total += train[j].rows();
      }
      pooled /= static_cast<double>(total);
      const double sigma_max = std::sqrt(pooled.diagonal().maxCoeff());
      c_list.push_back(theoretical_defaults(
                           (mu_hat_k - mu_hat_1).lpNorm<Eigen::Infinity>(),
                           sigma_max, rate)
                           .first);
    } else {
      c_list.push_back(options.c);
    }
  }

  const KClassFit fit =
      kclass_panda_fit(train, c_list, lambda, options.admm);

  Eigen::Index wrong = 0, total = 0;
  std::vector<Eigen::Index> per_class_wrong(options.num_classes, 0);
  for (int k = 0; k < options.num_classes; ++k) {
    for (Eigen::Index i = 0; i < test[k].rows(); ++i) {
      const int predicted = kclass_classify(fit, test[k].row(i).transpose());
      if (predicted != k + 1) {
        ++wrong;
        ++per_class_wrong[k];
      }
      ++total;
    }
  }
  const double error = static_cast<double>(wrong) / static_cast<double>(total);

  {
    auto file = open_out(options.common.out + "_kclass.csv");
    file << "class,n_test,errors,error_rate,tau_hat\n";
    for (int k = 0; k < options.num_classes; ++k) {
      file << (k + 1) << ',' << test[k].rows() << ',' << per_class_wrong[k]
           << ','
           << fmt(static_cast<double>(per_class_wrong[k]) /
                  static_cast<double>(test[k].rows()))
           << ',' << (k == 0 ? "" : fmt(fit.taus[k - 1])) << "\n";
    }
  }

  json manifest = admm_to_json(options.admm);
  manifest["command"] = "kclass";
  manifest["seed"] = options.common.seed;
  manifest["jobs"] = options.common.jobs;
  manifest["out"] = options.common.out;
  manifest["model"] = to_string(options.model);
  manifest["p"] = options.p;
  manifest["s"] = options.s;
  manifest["eta_scale"] = options.eta_scale;
  manifest["k"] = options.num_classes;
  manifest["n"] = options.n;
  manifest["n_test"] = options.n_test;
  manifest["mode"] = to_string(options.mode);
  manifest["c"] = options.c;
  manifest["lambda_tilde"] = options.lambda_tilde;
  write_manifest(options.common.out, manifest);

  std::cout << "kclass_test_error " << fmt(error) << " (uniform guess "
            << fmt(1.0 - 1.0 / options.num_classes) << ")\n";
  return 0;
}

}  // namespace panda::cli
