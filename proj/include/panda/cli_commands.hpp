#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "panda/dataset_io.hpp"
#include "panda/evaluation.hpp"

namespace panda::cli {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, quiet = 4 };

//! Level from the PANDA_LOG environment variable (default info).
LogLevel log_level();
void log(LogLevel level, const std::string& message);

struct CommonOptions {
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out = "panda";
};

//! Options for `simulate` and `tune`. Flat key-value JSON configs use the
//! same field names with methods/c_values as arrays.
struct SimulateOptions {
  CommonOptions common;
  SimModel model = SimModel::AR1;
  int p = 400;
  int s = 5;
  double eta_scale = 1.0;
  std::vector<Method> methods{Method::PANDA};
  Eigen::Index n0 = 200, n1 = 200, n_val = 200, n_test = 200;
  int replicates = 1;
  ParameterMode mode = ParameterMode::practical;
  double c = 20.0;
  double lambda_tilde = 1.0;
  std::vector<double> c_values;  // practical-mode tuning grid; default {c}
  double grid_min = 0.1, grid_max = 8.0, grid_step = 0.1;
  bool emit_curve = false;
  int trace_stride = 0;
  AdmmConfig admm;
};

struct FitOptions {
  CommonOptions common;
  std::string data_path;
  std::string label_column = "label";
  char delimiter = ',';
  double filter_fraction = 1.0 / 6.0;
  Eigen::Index select_m = 2000;
  std::optional<SplitCounts> split;  // default: 60/20/20 per class
  Method method = Method::PANDA;
  ParameterMode mode = ParameterMode::practical;
  double c = 20.0;
  double lambda_tilde = 1.0;
  double grid_min = 0.1, grid_max = 8.0, grid_step = 0.1;
  AdmmConfig admm;
};

struct OracleCheckOptions {
  CommonOptions common;
  int n_instances = 10;
  int max_p = 3;
  double gap_tol = 1e-2;
  double violation_tol = 1e-6;
  // Tight solves by default; the violation threshold leaves little room.
  AdmmConfig admm{1.0, 0.0, 100000, 1e-8, 1e-10, 0};
};

struct KClassOptions {
  CommonOptions common;
  SimModel model = SimModel::AR1;
  int p = 30;
  int s = 5;
  double eta_scale = 1.0;
  int num_classes = 3;
  Eigen::Index n = 100;       // training samples per class
  Eigen::Index n_test = 200;  // test samples per class
  ParameterMode mode = ParameterMode::fixed;  // fixed or theoretical
  double c = 20.0;
  double lambda_tilde = 1.0;
  AdmmConfig admm;
};

//! Load a flat JSON config file into defaults (unknown keys are an error).
void apply_config_file(const std::string& path, const std::string& command,
                       SimulateOptions& options);
void apply_config_file(const std::string& path, const std::string& command,
                       FitOptions& options);
void apply_config_file(const std::string& path, const std::string& command,
                       OracleCheckOptions& options);
void apply_config_file(const std::string& path, const std::string& command,
                       KClassOptions& options);

//! Run a full synthetic experiment; writes <out>_rows.csv, <out>_summary.csv,
//! optionally <out>_curve.csv and <out>_trace.csv, plus run_manifest.json
//! next to the output prefix.
int cmd_simulate(const SimulateOptions& options);

//! Tuning-curve variant of simulate: always emits the curve and reports the
//! selected lambda_tilde per method and replicate.
int cmd_tune(const SimulateOptions& options);

//! CSV pipeline: load, variance-filter, split, t-test select on the training
//! split, tune/fit, evaluate on the held-out test split.
int cmd_fit(const FitOptions& options);

//! Solver-versus-grid-oracle battery at p <= 3. Exit 1 when the worst
//! relative objective gap or constraint violation exceeds its threshold.
int cmd_oracle_check(const OracleCheckOptions& options);

//! Multi-class demo on a synthetic well-separated model.
int cmd_kclass(const KClassOptions& options);

}  // namespace panda::cli
