// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

// relaync command line: run experiments, list scenarios, check config files.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relaync/experiments.hpp"

namespace {

struct RunOptions {
  std::string config_path;
  std::optional<std::string> scenario;
  std::vector<double> snr;
  std::vector<double> rho;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::vector<int> n_hops;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
  std::string gnuplot_path;
};

relaync::ExperimentConfig build_config(const RunOptions& o) {
  relaync::ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = relaync::load_config(o.config_path);
  if (o.scenario) cfg.scenario = relaync::parse_scenario(*o.scenario);
  if (!o.snr.empty()) cfg.snr_db = o.snr;
  if (!o.rho.empty()) cfg.rho = o.rho;
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.n_hops.empty()) cfg.n_hops = o.n_hops;
  if (o.out) cfg.out_path = *o.out;
  if (o.workers) cfg.workers = *o.workers;
  cfg.validate();
  return cfg;
}

int run(const RunOptions& o) {
  const relaync::ExperimentConfig cfg = build_config(o);
  const relaync::ResultTable table = relaync::run_experiment(cfg);
  if (cfg.out_path.empty() || cfg.out_path == "-") {
    std::cout << relaync::to_csv(table);
  } else {
    relaync::emit_csv(table, cfg.out_path);
    std::cerr << "wrote " << table.rows.size() << " rows to " << cfg.out_path << '\n';
  }
  if (!o.gnuplot_path.empty()) {
    if (cfg.out_path.empty() || cfg.out_path == "-") {
      throw std::invalid_argument("--emit-gnuplot needs a CSV file (--out or out_path)");
    }
    relaync::emit_gnuplot(table, cfg.out_path, o.gnuplot_path);
    std::cerr << "wrote plot script " << o.gnuplot_path << '\n';
  }
  return 0;
}

int list_scenarios() {
  for (relaync::Scenario s : relaync::all_scenarios()) {
    std::cout << relaync::to_string(s) << '\t' << relaync::describe(s) << '\n';
  }
  return 0;
}

int validate_config(const std::string& path) {
  const relaync::ExperimentConfig cfg = relaync::load_config(path);
  cfg.validate();
  std::cout << path << ": ok (scenario " << relaync::to_string(cfg.scenario) << ", "
            << cfg.snr_db.size() * cfg.rho.size() << " snr/rho points, " << cfg.trials
            << " trials)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay network channel estimation experiments"};
  app.require_subcommand(1);

  RunOptions ro;
  CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment and write its CSV table");
  run_cmd->add_option("--config", ro.config_path, "Config file (key = value)")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--scenario", ro.scenario, "Scenario name (see list-scenarios)");
  run_cmd->add_option("--snr", ro.snr, "SNR grid in dB")->delimiter(',');
  run_cmd->add_option("--rho", ro.rho, "Pilot correlation grid")->delimiter(',');
  run_cmd->add_option("--trials", ro.trials, "Monte-Carlo trials per point");
  run_cmd->add_option("--seed", ro.seed, "64-bit seed");
  run_cmd->add_option("--n-hops", ro.n_hops, "Hop pairs N for chain scenarios")->delimiter(',');
  run_cmd->add_option("--out", ro.out, "CSV output path, '-' for stdout");
  run_cmd->add_option("--workers", ro.workers, "Worker threads (results do not depend on it)");
  run_cmd->add_option("--emit-gnuplot", ro.gnuplot_path, "Also write a gnuplot script here");

  app.add_subcommand("list-scenarios", "List scenario names");

  std::string validate_path;
  CLI::App* validate_cmd = app.add_subcommand("validate-config", "Check a config file");
  validate_cmd->add_option("--config,config", validate_path, "Config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run(ro);
    if (validate_cmd->parsed()) return validate_config(validate_path);
    return list_scenarios();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
