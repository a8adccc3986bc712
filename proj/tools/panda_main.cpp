#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "panda/cli_commands.hpp"

namespace {

using namespace panda;
using namespace panda::cli;

// Flags override config-file values, so each subcommand first loads the
// config (if any) and then re-applies whatever the user typed.

void add_admm_flags(CLI::App* cmd, AdmmConfig& admm) {
  cmd->add_option("--admm-rho", admm.rho, "ADMM penalty parameter");
  cmd->add_option("--admm-eta", admm.eta,
                  "primal step size (<= 0 selects per-block automatic steps)");
  cmd->add_option("--admm-max-iters", admm.max_iters, "iteration cap");
  cmd->add_option("--admm-primal-tol", admm.primal_tol,
                  "relative primal residual tolerance");
  cmd->add_option("--admm-change-tol", admm.change_tol,
                  "relative iterate-change tolerance");
}

void add_common_flags(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--seed", common.seed, "base seed");
  cmd->add_option("--jobs", common.jobs, "replicate-level parallelism");
  cmd->add_option("--out", common.out, "output path prefix");
}

int dispatch(int argc, char** argv) {
  CLI::App app{
      "PANDA: pivotal high-dimensional linear discriminant analysis, with "
      "LPD and AdaLDA baselines, a proximal-ADMM conic solver, synthetic "
      "models, and a replicated benchmark harness"};
  app.require_subcommand(1);

  // simulate / tune share their option surface.
  SimulateOptions sim;
  std::string sim_config;
  std::vector<std::string> sim_methods;
  std::string sim_model, sim_mode;
  Eigen::Index sim_n = 0;
  auto configure_simulate = [&](CLI::App* cmd) {
    cmd->add_option("--config", sim_config, "flat JSON config file");
    add_common_flags(cmd, sim.common);
    cmd->add_option("--model", sim_model,
                    "ar1|varying_diagonal|erdos_renyi|block_sparse|"
                    "approx_sparse");
    cmd->add_option("--p", sim.p, "dimension");
    cmd->add_option("--s", sim.s, "support size");
    cmd->add_option("--eta-scale", sim.eta_scale, "true-direction scale");
    cmd->add_option("--method", sim_methods,
                    "panda|lpd|adalda|bayes (repeatable)");
    cmd->add_option("--n", sim_n, "training samples per class");
    cmd->add_option("--n-val", sim.n_val, "validation samples per class");
    cmd->add_option("--n-test", sim.n_test, "test samples per class");
    cmd->add_option("--replicates", sim.replicates, "number of replicates");
    cmd->add_option("--mode", sim_mode, "theoretical|practical|fixed");
    cmd->add_option("--c", sim.c, "tau^2 penalty weight");
    cmd->add_option("--lambda-tilde", sim.lambda_tilde,
                    "fixed-mode tuning factor");
    cmd->add_option("--c-values", sim.c_values,
                    "practical-mode c grid (repeatable)");
    cmd->add_option("--grid-min", sim.grid_min, "lambda_tilde grid start");
    cmd->add_option("--grid-max", sim.grid_max, "lambda_tilde grid end");
    cmd->add_option("--grid-step", sim.grid_step, "lambda_tilde grid step");
    cmd->add_flag("--emit-curve", sim.emit_curve, "write the tuning curve");
    cmd->add_option("--trace-stride", sim.trace_stride,
                    "solver trace stride for replicate 0");
    add_admm_flags(cmd, sim.admm);
  };
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run a synthetic experiment and write CSV tables");
  configure_simulate(simulate);
  CLI::App* tune = app.add_subcommand(
      "tune", "sweep the tuning grid and write the validation curve");
  configure_simulate(tune);

  FitOptions fit;
  std::string fit_config, fit_method, fit_mode, fit_delimiter;
  std::vector<Eigen::Index> fit_split;
  CLI::App* fit_cmd =
      app.add_subcommand("fit", "fit on a labelled CSV dataset");
  fit_cmd->add_option("--config", fit_config, "flat JSON config file");
  add_common_flags(fit_cmd, fit.common);
  fit_cmd->add_option("--data", fit.data_path, "input CSV path");
  fit_cmd->add_option("--label-column", fit.label_column,
                      "name of the 0/1 label column");
  fit_cmd->add_option("--delimiter", fit_delimiter, "cell delimiter");
  fit_cmd->add_option("--filter-fraction", fit.filter_fraction,
                      "variance tail fraction to drop");
  fit_cmd->add_option("--select-m", fit.select_m,
                      "features kept by the t-test screen");
  fit_cmd->add_option("--split", fit_split,
                      "train0 train1 val0 val1 test0 test1");
  fit_cmd->add_option("--method", fit_method, "panda|lpd|adalda");
  fit_cmd->add_option("--mode", fit_mode, "theoretical|practical|fixed");
  fit_cmd->add_option("--c", fit.c, "tau^2 penalty weight");
  fit_cmd->add_option("--lambda-tilde", fit.lambda_tilde,
                      "fixed-mode tuning factor");
  fit_cmd->add_option("--grid-min", fit.grid_min, "lambda_tilde grid start");
  fit_cmd->add_option("--grid-max", fit.grid_max, "lambda_tilde grid end");
  fit_cmd->add_option("--grid-step", fit.grid_step, "lambda_tilde grid step");
  add_admm_flags(fit_cmd, fit.admm);

  OracleCheckOptions oracle;
  std::string oracle_config;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle-check", "compare the solver against dense grid oracles");
  oracle_cmd->add_option("--config", oracle_config, "flat JSON config file");
  add_common_flags(oracle_cmd, oracle.common);
  oracle_cmd->add_option("--n-instances", oracle.n_instances,
                         "random instances per dimension");
  oracle_cmd->add_option("--max-p", oracle.max_p, "largest dimension (<= 3)");
  oracle_cmd->add_option("--gap-tol", oracle.gap_tol,
                         "relative objective gap threshold");
  oracle_cmd->add_option("--violation-tol", oracle.violation_tol,
                         "constraint violation threshold");
  add_admm_flags(oracle_cmd, oracle.admm);

  KClassOptions kclass;
  std::string kclass_config, kclass_model, kclass_mode;
  CLI::App* kclass_cmd = app.add_subcommand(
      "kclass", "multi-class fit on a synthetic separated model");
  kclass_cmd->add_option("--config", kclass_config, "flat JSON config file");
  add_common_flags(kclass_cmd, kclass.common);
  kclass_cmd->add_option("--model", kclass_model, "covariance recipe");
  kclass_cmd->add_option("--p", kclass.p, "dimension");
  kclass_cmd->add_option("--s", kclass.s, "support size per class");
  kclass_cmd->add_option("--eta-scale", kclass.eta_scale,
                         "true-direction scale");
  kclass_cmd->add_option("--k", kclass.num_classes, "number of classes");
  kclass_cmd->add_option("--n", kclass.n, "training samples per class");
  kclass_cmd->add_option("--n-test", kclass.n_test,
                         "test samples per class");
  kclass_cmd->add_option("--mode", kclass_mode, "theoretical|fixed");
  kclass_cmd->add_option("--c", kclass.c, "tau^2 penalty weight");
  kclass_cmd->add_option("--lambda-tilde", kclass.lambda_tilde,
                         "tuning factor");
  add_admm_flags(kclass_cmd, kclass.admm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Normalize CLI11's exit codes onto the documented contract: help is
    // success, every usage problem is 2.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto run_simulate_family = [&](CLI::App* cmd, const std::string& name) {
    SimulateOptions defaults;  // flag targets already hold user values
    if (!sim_config.empty()) {
      apply_config_file(sim_config, name, defaults);
    }
    // Start from config-file values, then overlay each explicitly-given flag.
    SimulateOptions resolved = defaults;
    if (cmd->count("--seed")) resolved.common.seed = sim.common.seed;
    if (cmd->count("--jobs")) resolved.common.jobs = sim.common.jobs;
    if (cmd->count("--out")) resolved.common.out = sim.common.out;
    if (cmd->count("--model")) resolved.model = sim_model_from_string(sim_model);
    if (cmd->count("--p")) resolved.p = sim.p;
    if (cmd->count("--s")) resolved.s = sim.s;
    if (cmd->count("--eta-scale")) resolved.eta_scale = sim.eta_scale;
    if (cmd->count("--method")) {
      resolved.methods.clear();
      for (const std::string& m : sim_methods) {
        resolved.methods.push_back(method_from_string(m));
      }
    }
    if (cmd->count("--n")) resolved.n0 = resolved.n1 = sim_n;
    if (cmd->count("--n-val")) resolved.n_val = sim.n_val;
    if (cmd->count("--n-test")) resolved.n_test = sim.n_test;
    if (cmd->count("--replicates")) resolved.replicates = sim.replicates;
    if (cmd->count("--mode")) {
      resolved.mode = parameter_mode_from_string(sim_mode);
    }
    if (cmd->count("--c")) resolved.c = sim.c;
    if (cmd->count("--lambda-tilde")) resolved.lambda_tilde = sim.lambda_tilde;
    if (cmd->count("--c-values")) resolved.c_values = sim.c_values;
    if (cmd->count("--grid-min")) resolved.grid_min = sim.grid_min;
    if (cmd->count("--grid-max")) resolved.grid_max = sim.grid_max;
    if (cmd->count("--grid-step")) resolved.grid_step = sim.grid_step;
    if (cmd->count("--emit-curve")) resolved.emit_curve = sim.emit_curve;
    if (cmd->count("--trace-stride")) resolved.trace_stride = sim.trace_stride;
    if (cmd->count("--admm-rho")) resolved.admm.rho = sim.admm.rho;
    if (cmd->count("--admm-eta")) resolved.admm.eta = sim.admm.eta;
    if (cmd->count("--admm-max-iters")) {
      resolved.admm.max_iters = sim.admm.max_iters;
    }
    if (cmd->count("--admm-primal-tol")) {
      resolved.admm.primal_tol = sim.admm.primal_tol;
    }
    if (cmd->count("--admm-change-tol")) {
      resolved.admm.change_tol = sim.admm.change_tol;
    }
    return name == "simulate" ? cmd_simulate(resolved) : cmd_tune(resolved);
  };

  if (simulate->parsed()) return run_simulate_family(simulate, "simulate");
  if (tune->parsed()) return run_simulate_family(tune, "tune");

  if (fit_cmd->parsed()) {
    FitOptions resolved;
    if (!fit_config.empty()) apply_config_file(fit_config, "fit", resolved);
    if (fit_cmd->count("--seed")) resolved.common.seed = fit.common.seed;
    if (fit_cmd->count("--jobs")) resolved.common.jobs = fit.common.jobs;
    if (fit_cmd->count("--out")) resolved.common.out = fit.common.out;
    if (fit_cmd->count("--data")) resolved.data_path = fit.data_path;
    if (fit_cmd->count("--label-column")) {
      resolved.label_column = fit.label_column;
    }
    if (fit_cmd->count("--delimiter")) {
      if (fit_delimiter.size() != 1) {
        throw InvalidInput("delimiter must be a single character");
      }
      resolved.delimiter = fit_delimiter[0];
    }
    if (fit_cmd->count("--filter-fraction")) {
      resolved.filter_fraction = fit.filter_fraction;
    }
    if (fit_cmd->count("--select-m")) resolved.select_m = fit.select_m;
    if (fit_cmd->count("--split")) {
      if (fit_split.size() != 6) {
        throw InvalidInput("--split needs 6 counts");
      }
      resolved.split = SplitCounts{fit_split[0], fit_split[1], fit_split[2],
                                   fit_split[3], fit_split[4], fit_split[5]};
    }
    if (fit_cmd->count("--method")) {
      resolved.method = method_from_string(fit_method);
    }
    if (fit_cmd->count("--mode")) {
      resolved.mode = parameter_mode_from_string(fit_mode);
    }
    if (fit_cmd->count("--c")) resolved.c = fit.c;
    if (fit_cmd->count("--lambda-tilde")) {
      resolved.lambda_tilde = fit.lambda_tilde;
    }
    if (fit_cmd->count("--grid-min")) resolved.grid_min = fit.grid_min;
    if (fit_cmd->count("--grid-max")) resolved.grid_max = fit.grid_max;
    if (fit_cmd->count("--grid-step")) resolved.grid_step = fit.grid_step;
    if (fit_cmd->count("--admm-rho")) resolved.admm.rho = fit.admm.rho;
    if (fit_cmd->count("--admm-eta")) resolved.admm.eta = fit.admm.eta;
    if (fit_cmd->count("--admm-max-iters")) {
      resolved.admm.max_iters = fit.admm.max_iters;
    }
    if (fit_cmd->count("--admm-primal-tol")) {
      resolved.admm.primal_tol = fit.admm.primal_tol;
    }
    if (fit_cmd->count("--admm-change-tol")) {
      resolved.admm.change_tol = fit.admm.change_tol;
    }
    return cmd_fit(resolved);
  }

  if (oracle_cmd->parsed()) {
    OracleCheckOptions resolved;
    if (!oracle_config.empty()) {
      apply_config_file(oracle_config, "oracle-check", resolved);
    }
    if (oracle_cmd->count("--seed")) resolved.common.seed = oracle.common.seed;
    if (oracle_cmd->count("--jobs")) resolved.common.jobs = oracle.common.jobs;
    if (oracle_cmd->count("--out")) resolved.common.out = oracle.common.out;
    if (oracle_cmd->count("--n-instances")) {
      resolved.n_instances = oracle.n_instances;
    }
    if (oracle_cmd->count("--max-p")) resolved.max_p = oracle.max_p;
    if (oracle_cmd->count("--gap-tol")) resolved.gap_tol = oracle.gap_tol;
    if (oracle_cmd->count("--violation-tol")) {
      resolved.violation_tol = oracle.violation_tol;
    }
    if (oracle_cmd->count("--admm-rho")) resolved.admm.rho = oracle.admm.rho;
    if (oracle_cmd->count("--admm-eta")) resolved.admm.eta = oracle.admm.eta;
    if (oracle_cmd->count("--admm-max-iters")) {
      resolved.admm.max_iters = oracle.admm.max_iters;
    }
    if (oracle_cmd->count("--admm-primal-tol")) {
      resolved.admm.primal_tol = oracle.admm.primal_tol;
    }
    if (oracle_cmd->count("--admm-change-tol")) {
      resolved.admm.change_tol = oracle.admm.change_tol;
    }
    return cmd_oracle_check(resolved);
  }

  if (kclass_cmd->parsed()) {
    KClassOptions resolved;
    if (!kclass_config.empty()) {
      apply_config_file(kclass_config, "kclass", resolved);
    }
    if (kclass_cmd->count("--seed")) {
      resolved.common.seed = kclass.common.seed;
    }
    if (kclass_cmd->count("--jobs")) resolved.common.jobs = kclass.common.jobs;
    if (kclass_cmd->count("--out")) resolved.common.out = kclass.common.out;
    if (kclass_cmd->count("--model")) {
      resolved.model = sim_model_from_string(kclass_model);
    }
    if (kclass_cmd->count("--p")) resolved.p = kclass.p;
    if (kclass_cmd->count("--s")) resolved.s = kclass.s;
    if (kclass_cmd->count("--eta-scale")) {
      resolved.eta_scale = kclass.eta_scale;
    }
    if (kclass_cmd->count("--k")) resolved.num_classes = kclass.num_classes;
    if (kclass_cmd->count("--n")) resolved.n = kclass.n;
    if (kclass_cmd->count("--n-test")) resolved.n_test = kclass.n_test;
    if (kclass_cmd->count("--mode")) {
      resolved.mode = parameter_mode_from_string(kclass_mode);
    }
    if (kclass_cmd->count("--c")) resolved.c = kclass.c;
    if (kclass_cmd->count("--lambda-tilde")) {
      resolved.lambda_tilde = kclass.lambda_tilde;
    }
    if (kclass_cmd->count("--admm-rho")) resolved.admm.rho = kclass.admm.rho;
    if (kclass_cmd->count("--admm-eta")) resolved.admm.eta = kclass.admm.eta;
    if (kclass_cmd->count("--admm-max-iters")) {
      resolved.admm.max_iters = kclass.admm.max_iters;
    }
    if (kclass_cmd->count("--admm-primal-tol")) {
      resolved.admm.primal_tol = kclass.admm.primal_tol;
    }
    if (kclass_cmd->count("--admm-change-tol")) {
      resolved.admm.change_tol = kclass.admm.change_tol;
    }
    return cmd_kclass(resolved);
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const panda::InvalidInput& e) {
    std::cerr << "[panda] error: " << e.what() << "\n";
    return 2;
  } catch (const panda::SolverDiverged& e) {
    std::cerr << "[panda] solver failure: " << e.what() << "\n";
    return 3;
  } catch (const panda::EstimatorInfeasible& e) {
    std::cerr << "[panda] solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "[panda] error: " << e.what() << "\n";
    return 2;
  }
}
