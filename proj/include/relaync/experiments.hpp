// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RELAYNC_EXPERIMENTS_HPP
#define RELAYNC_EXPERIMENTS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relaync {

enum class Scenario {
  fourhop_lmmse,
  fourhop_ml,
  fourhop_aesnr,
  fourhop_baseline,
  multihop_sweep,
  asymptotic_check,
};

std::string_view to_string(Scenario s);
// Throws std::invalid_argument for an unknown name.
Scenario parse_scenario(std::string_view name);
const std::vector<Scenario>& all_scenarios();
// One-line description for list-scenarios.
std::string_view describe(Scenario s);

struct ExperimentConfig {
  Scenario scenario = Scenario::fourhop_lmmse;
  std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  std::vector<double> rho{0.0, 0.5, 0.9};
  std::size_t trials = 100000;
  std::size_t L = 8;
  // Hop pairs; used by multihop-sweep and asymptotic-check.
  std::vector<int> n_hops{2, 4, 8};
  std::uint64_t seed = 1;
  // Every node transmits with power_model * 10^(snr_db / 10); sigma_n^2 = 1.
  double power_model = 1.0;
  // Data rounds per trial in fourhop-aesnr.
  std::size_t data_rounds = 16;
  // Common hop variance in asymptotic-check (omega = this value, unit gains).
  double omega = 0.5;
  std::string out_path;
  // Execution only; results do not depend on it.
  std::size_t workers = 1;

  // Throws std::invalid_argument naming the offending key.
  void validate() const;
};

// Flat "key = value" text, '#' starts a comment, lists are comma separated.
// Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  std::string scenario;
  double snr_db = 0.0;
  double rho = 0.0;
  int n_hops = 4;  // total hops: 4, or 2N on a chain of N hop pairs
  std::string metric;
  double empirical = 0.0;
  std::optional<double> closed_form;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

ResultTable run_experiment(const ExperimentConfig& cfg);

inline constexpr std::string_view kCsvHeader =
    "scenario,snr_db,rho,n_hops,metric,empirical,closed_form,trials,seed";

// Numbers with 10 significant digits, LF line endings. A missing closed form
// is an empty field.
std::string to_csv(const ResultTable& table);
void emit_csv(const ResultTable& table, const std::string& path);
// Throws std::invalid_argument on a malformed document.
ResultTable parse_csv(std::string_view text);

// Gnuplot script with one panel per metric, empirical points against closed
// forms, reading csv_path.
std::string gnuplot_script(const ResultTable& table, const std::string& csv_path);
void emit_gnuplot(const ResultTable& table, const std::string& csv_path,
                  const std::string& script_path);

}  // namespace relaync

#endif  // RELAYNC_EXPERIMENTS_HPP
