// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaync/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "relaync/bounds.hpp"
#include "relaync/channel.hpp"
#include "relaync/estimators.hpp"
#include "relaync/multihop.hpp"
#include "relaync/simulator.hpp"

namespace relaync {

namespace {

struct ScenarioInfo {
  Scenario s;
  std::string_view name;
  std::string_view text;
};

constexpr ScenarioInfo kScenarios[] = {
    {Scenario::fourhop_lmmse, "fourhop-lmmse", "4-hop LMMSE MSE of theta1, theta2 vs closed form"},
    {Scenario::fourhop_ml, "fourhop-ml", "4-hop ML MSE of theta1, theta2 vs the CRLB at the true theta1"},
    {Scenario::fourhop_aesnr, "fourhop-aesnr",
     "4-hop AESNR at T1 with LMMSE and perfect CSI vs the perfect-CSI closed form"},
    {Scenario::fourhop_baseline, "fourhop-baseline",
     "4-hop LMMSE vs per-hop point-to-point estimation"},
    {Scenario::multihop_sweep, "multihop-sweep",
     "2N-hop LMMSE and LS MSE of varpi1, varpi2 vs exact LMMSE MSE and CRLB"},
    {Scenario::asymptotic_check, "asymptotic-check",
     "unit-gain 2N-hop LS MSE vs the large-N closed form"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty())
    throw std::invalid_argument("config key '" + key + "': not a number: '" + v + "'");
  return d;
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  std::uint64_t n = 0;
  try {
    if (!v.empty() && v[0] != '-') n = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty())
    throw std::invalid_argument("config key '" + key + "': not a nonnegative integer: '" + v + "'");
  return n;
}

std::vector<double> to_doubles(const std::string& v, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(item, key));
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < n && !failed; i = next++) fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// A metric is the trial mean of sample `emp`. Its closed form is either a fixed
// value or the trial mean of sample `closed_avg`.
struct Metric {
  std::string name;
  std::size_t emp = 0;
  std::optional<double> closed_fixed;
  std::optional<std::size_t> closed_avg;
};

struct PointJob {
  int n_hops = 4;
  std::vector<Metric> metrics;
  std::size_t samples = 0;
  std::function<void(RngStream&, double*)> trial;
};

double sq(cplx e) { return std::norm(e); }

PowerProfile profile_for(const ExperimentConfig& cfg, double snr_db, int N) {
  const double p = cfg.power_model * std::pow(10.0, snr_db / 10.0);
  return PowerProfile::equal_power(p, N, 1.0, 1.0);
}

// Orthogonal-or-rho pilots at full power L * P.
TrainingSet pilots_for(const ExperimentConfig& cfg, const PowerProfile& p, double rho) {
  const double L = double(cfg.L);
  return build_training(cfg.L, rho, L * p.P1, L * p.P2, L * p.relay_power(1));
}

PointJob fourhop_job(const ExperimentConfig& cfg, double snr_db, double rho) {
  const PowerProfile profile = profile_for(cfg, snr_db, 2);
  const Gains gains = compute_gains(profile, cfg.L);
  const ThetaStatistics stats = theta_statistics(gains);
  const TrainingSet ts = pilots_for(cfg, profile, rho);
  const double nv = profile.sigma_n2;
  PointJob job;
  job.n_hops = 4;

  switch (cfg.scenario) {
    case Scenario::fourhop_lmmse: {
      const BoundResult e = lmmse_mse_closed_form(ts, gains, stats, nv);
      const auto est = std::make_shared<LmmseEstimator>(ts, gains, stats, nv);
      job.samples = 2;
      job.metrics = {{"mse_theta1", 0, e.first, {}}, {"mse_theta2", 1, e.second, {}}};
      job.trial = [=](RngStream& rng, double* out) {
        const ChannelRealization ch = draw_channels(profile, 2, rng);
        const auto obs = run_training_round_4hop(ch, gains, ts, nv, rng);
        const ThetaEstimate t = est->estimate(obs.z3);
        out[0] = sq(t.theta1_hat - obs.theta1);
        out[1] = sq(t.theta2_hat - obs.theta2);
      };
      break;
    }
    case Scenario::fourhop_ml: {
      const auto est = std::make_shared<MlEstimator>(ts, gains, nv);
      job.samples = 4;
      job.metrics = {{"mse_theta1", 0, {}, 2}, {"mse_theta2", 1, {}, 3}};
      job.trial = [=](RngStream& rng, double* out) {
        const ChannelRealization ch = draw_channels(profile, 2, rng);
        const auto obs = run_training_round_4hop(ch, gains, ts, nv, rng);
        const ThetaEstimate t = est->estimate(obs.z3);
        const BoundResult c = crlb_4hop(ts, gains, obs.theta1, nv);
        out[0] = sq(t.theta1_hat - obs.theta1);
        out[1] = sq(t.theta2_hat - obs.theta2);
        out[2] = c.first;
        out[3] = c.second;
      };
      break;
    }
    case Scenario::fourhop_aesnr: {
      const auto est = std::make_shared<LmmseEstimator>(ts, gains, stats, nv);
      const std::size_t rounds = cfg.data_rounds;
      job.samples = 3;
      job.metrics = {{"aesnr_estimated_csi", 0, {}, 2}, {"aesnr_perfect_csi", 1, {}, 2}};
      job.trial = [=](RngStream& rng, double* out) {
        const ChannelRealization ch = draw_channels(profile, 2, rng);
        const auto obs = run_training_round_4hop(ch, gains, ts, nv, rng);
        const ChannelStateInfo csi = estimated_csi(obs, est->estimate(obs.z3), ts, gains, nv);
        DataExchangeOptions opt;
        opt.rounds = rounds;
        opt.P1 = profile.P1;
        opt.P2 = profile.P2;
        opt.sigma_n2 = nv;
        // Both runs see the same symbols and noise.
        RngStream copy = rng;
        out[0] = effective_snr_at_t1(run_data_exchange_4hop(ch, gains, opt, csi, rng));
        out[1] = effective_snr_at_t1(run_data_exchange_4hop(ch, gains, opt, perfect_csi(ch, gains), copy));
        out[2] = aesnr_closed_form(ch, gains, profile.P2, nv);
      };
      break;
    }
    case Scenario::fourhop_baseline: {
      const BoundResult e = lmmse_mse_closed_form(ts, gains, stats, nv);
      const auto est = std::make_shared<LmmseEstimator>(ts, gains, stats, nv);
      job.samples = 4;
      job.metrics = {{"mse_theta1_lmmse", 0, e.first, {}},
                     {"mse_theta1_p2p", 1, {}, {}},
                     {"mse_theta2_lmmse", 2, e.second, {}},
                     {"mse_theta2_p2p", 3, {}, {}}};
      job.trial = [=](RngStream& rng, double* out) {
        const ChannelRealization ch = draw_channels(profile, 2, rng);
        const auto obs = run_training_round_4hop(ch, gains, ts, nv, rng);
        const ThetaEstimate t = est->estimate(obs.z3);
        const ThetaEstimate b = point_to_point_baseline(ch, ts, nv, rng);
        out[0] = sq(t.theta1_hat - obs.theta1);
        out[1] = sq(b.theta1_hat - obs.theta1);
        out[2] = sq(t.theta2_hat - obs.theta2);
        out[3] = sq(b.theta2_hat - obs.theta2);
      };
      break;
    }
    default:
      throw std::logic_error("fourhop_job: not a 4-hop scenario");
  }
  return job;
}

PointJob multihop_job(const ExperimentConfig& cfg, double snr_db, double rho, int N) {
  PointJob job;
  job.n_hops = 2 * N;
  const double L = double(cfg.L);
  const double p = cfg.power_model * std::pow(10.0, snr_db / 10.0);

  if (cfg.scenario == Scenario::multihop_sweep) {
    const PowerProfile profile = profile_for(cfg, snr_db, N);
    const MultihopGains gains = compute_multihop_gains(profile, cfg.L);
    const TrainingSet ts = build_training(cfg.L, rho, L * p, L * p, L * p);
    const MultihopPriors priors = multihop_priors(profile, N);
    const MultihopNoise noise = multihop_noise_factors(profile, gains);
    const double nv = profile.sigma_n2;
    const BoundResult e = multihop_lmmse_mse(ts, gains, priors, noise, nv);
    const BoundResult c = multihop_crlb(ts, gains, noise, nv);
    const auto est = std::make_shared<MultihopLmmse>(ts, gains, priors, noise, nv);
    job.samples = 4;
    job.metrics = {{"mse_varpi1_lmmse", 0, e.first, {}},
                   {"mse_varpi2_lmmse", 1, e.second, {}},
                   {"mse_varpi1_ls", 2, c.first, {}},
                   {"mse_varpi2_ls", 3, c.second, {}}};
    job.trial = [=](RngStream& rng, double* out) {
      const ChannelRealization ch = draw_channels(profile, N, rng);
      const auto obs = run_training_2Nhop(ch, profile, gains, ts, nv, rng);
      const ThetaEstimate t = est->estimate(obs.z1N);
      const ThetaEstimate l = ls_estimate_2N(obs.z1N, ts, gains);
      out[0] = sq(t.theta1_hat - obs.varpi1);
      out[1] = sq(t.theta2_hat - obs.varpi2);
      out[2] = sq(l.theta1_hat - obs.varpi1);
      out[3] = sq(l.theta2_hat - obs.varpi2);
    };
    return job;
  }

  // asymptotic-check: unit gains, every hop variance omega, sigma_n^2 = 1.
  PowerProfile profile = PowerProfile::equal_power(p, N, cfg.omega, 1.0);
  const MultihopGains gains = unit_multihop_gains(N);
  const TrainingSet ts = build_training(cfg.L, rho, L * p, L * p, L * p);
  AsymptoticParams ap;
  ap.omega = cfg.omega;
  ap.kappa = 1.0;
  ap.sigma = std::sqrt(cfg.omega);
  ap.N = N;
  const BoundResult a = asymptotic_2Nhop_bounds(ap, ts, profile.sigma_n2).first;
  const double nv = profile.sigma_n2;
  job.samples = 2;
  job.metrics = {{"mse_varpi1_ls", 0, a.first, {}}, {"mse_varpi2_ls", 1, a.second, {}}};
  job.trial = [=](RngStream& rng, double* out) {
    const ChannelRealization ch = draw_channels(profile, N, rng);
    const auto obs = run_training_2Nhop(ch, profile, gains, ts, nv, rng);
    const ThetaEstimate l = ls_estimate_2N(obs.z1N, ts, gains);
    out[0] = sq(l.theta1_hat - obs.varpi1);
    out[1] = sq(l.theta2_hat - obs.varpi2);
  };
  return job;
}

bool is_multihop(Scenario s) {
  return s == Scenario::multihop_sweep || s == Scenario::asymptotic_check;
}

}  // namespace

std::string_view to_string(Scenario s) {
  for (const auto& info : kScenarios)
    if (info.s == s) return info.name;
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  for (const auto& info : kScenarios)
    if (info.name == name) return info.s;
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> v = [] {
    std::vector<Scenario> out;
    for (const auto& info : kScenarios) out.push_back(info.s);
    return out;
  }();
  return v;
}

std::string_view describe(Scenario s) {
  for (const auto& info : kScenarios)
    if (info.s == s) return info.text;
  return "";
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (trials < 1) fail("trials must be >= 1");
  if (snr_db.empty()) fail("snr_db must not be empty");
  if (rho.empty()) fail("rho must not be empty");
  for (double r : rho)
    if (!(r >= 0.0 && r < 1.0)) fail("rho values must lie in [0, 1)");
  for (double s : snr_db)
    if (!std::isfinite(s)) fail("snr_db values must be finite");
  if (L < 3) fail("L must be >= 3");
  if (!(power_model > 0.0) || !std::isfinite(power_model)) fail("power_model must be > 0");
  if (workers < 1) fail("workers must be >= 1");
  if (scenario == Scenario::fourhop_aesnr && data_rounds < 2)
    fail("data_rounds must be >= 2");
  if (is_multihop(scenario)) {
    if (n_hops.empty()) fail("n_hops must not be empty");
    for (int n : n_hops)
      if (n < 2 || n > 64) fail("n_hops values must lie in [2, 64]");
  }
  if (scenario == Scenario::asymptotic_check && !(omega > 0.0 && omega < 1.0))
    fail("omega must lie in (0, 1)");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string val = trim(std::string_view(t).substr(eq + 1));
    if (key == "scenario") {
      cfg.scenario = parse_scenario(val);
    } else if (key == "snr_db") {
      cfg.snr_db = to_doubles(val, key);
    } else if (key == "rho") {
      cfg.rho = to_doubles(val, key);
    } else if (key == "trials") {
      cfg.trials = to_u64(val, key);
    } else if (key == "L") {
      cfg.L = to_u64(val, key);
    } else if (key == "n_hops" || key == "N") {
      cfg.n_hops.clear();
      for (const auto& item : split(val, ',')) cfg.n_hops.push_back(int(to_u64(item, key)));
    } else if (key == "seed") {
      cfg.seed = to_u64(val, key);
    } else if (key == "power_model") {
      cfg.power_model = to_double(val, key);
    } else if (key == "data_rounds") {
      cfg.data_rounds = to_u64(val, key);
    } else if (key == "omega") {
      cfg.omega = to_double(val, key);
    } else if (key == "out_path") {
      cfg.out_path = val;
    } else if (key == "workers") {
      cfg.workers = to_u64(val, key);
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultTable table;
  const std::vector<int> pairs = is_multihop(cfg.scenario) ? cfg.n_hops : std::vector<int>{2};
  std::uint64_t point = 0;
  for (double snr : cfg.snr_db) {
    for (double rho : cfg.rho) {
      for (int N : pairs) {
        const PointJob job = is_multihop(cfg.scenario) ? multihop_job(cfg, snr, rho, N)
                                                       : fourhop_job(cfg, snr, rho);
        std::vector<double> samples(cfg.trials * job.samples);
        const std::uint64_t base = point << 32;
        parallel_for(cfg.trials, cfg.workers, [&](std::size_t k) {
          RngStream rng(cfg.seed, base | std::uint64_t(k));
          job.trial(rng, samples.data() + k * job.samples);
        });
        // Fixed trial order keeps the sums independent of the worker count.
        std::vector<double> mean(job.samples, 0.0);
        for (std::size_t k = 0; k < cfg.trials; ++k)
          for (std::size_t j = 0; j < job.samples; ++j) mean[j] += samples[k * job.samples + j];
        for (double& m : mean) m /= double(cfg.trials);

        for (const Metric& m : job.metrics) {
          ResultRow row;
          row.scenario = std::string(to_string(cfg.scenario));
          row.snr_db = snr;
          row.rho = rho;
          row.n_hops = job.n_hops;
          row.metric = m.name;
          row.empirical = mean[m.emp];
          if (m.closed_fixed) row.closed_form = *m.closed_fixed;
          if (m.closed_avg) row.closed_form = mean[*m.closed_avg];
          row.trials = cfg.trials;
          row.seed = cfg.seed;
          if (!std::isfinite(row.empirical) || (row.closed_form && !std::isfinite(*row.closed_form)))
            throw std::runtime_error("run_experiment: non-finite value for " + m.name);
          table.rows.push_back(std::move(row));
        }
        ++point;
      }
    }
  }
  return table;
}

std::string to_csv(const ResultTable& table) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const ResultRow& r : table.rows) {
    out += r.scenario + ',' + format_number(r.snr_db) + ',' + format_number(r.rho) + ',' +
           std::to_string(r.n_hops) + ',' + r.metric + ',' + format_number(r.empirical) + ',' +
           (r.closed_form ? format_number(*r.closed_form) : std::string()) + ',' +
           std::to_string(r.trials) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

void emit_csv(const ResultTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << to_csv(table);
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

ResultTable parse_csv(std::string_view text) {
  ResultTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::invalid_argument("parse_csv: missing or unexpected header");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9)
      throw std::invalid_argument("parse_csv: line " + std::to_string(lineno) + " has " +
                                  std::to_string(f.size()) + " fields");
    ResultRow r;
    r.scenario = f[0];
    r.snr_db = to_double(f[1], "snr_db");
    r.rho = to_double(f[2], "rho");
    r.n_hops = int(to_u64(f[3], "n_hops"));
    r.metric = f[4];
    r.empirical = to_double(f[5], "empirical");
    if (!f[6].empty()) r.closed_form = to_double(f[6], "closed_form");
    r.trials = to_u64(f[7], "trials");
    r.seed = to_u64(f[8], "seed");
    table.rows.push_back(std::move(r));
  }
  return table;
}

std::string gnuplot_script(const ResultTable& table, const std::string& csv_path) {
  // Group by (metric, rho, n_hops) so each curve is a function of SNR.
  std::map<std::string, std::vector<std::string>> panels;
  for (const ResultRow& r : table.rows) {
    auto& curves = panels[r.metric];
    const std::string key = format_number(r.rho) + ',' + std::to_string(r.n_hops);
    if (std::find(curves.begin(), curves.end(), key) == curves.end()) curves.push_back(key);
  }
  std::ostringstream s;
  s << "# columns: " << kCsvHeader << '\n';
  s << "set datafile separator ','\n";
  s << "set key outside right\n";
  s << "set logscale y\n";
  s << "set xlabel 'SNR (dB)'\n";
  s << "set terminal pngcairo size 900,600\n";
  for (const auto& [metric, curves] : panels) {
    s << "set output '" << metric << ".png'\n";
    s << "set title '" << metric << "'\n";
    s << "plot ";
    bool first = true;
    for (const std::string& key : curves) {
      const auto parts = split(key, ',');
      const std::string cond = "strcol(5) eq '" + metric + "' && $3 == " + parts[0] +
                               " && $4 == " + parts[1];
      const std::string label = "rho=" + parts[0] + " hops=" + parts[1];
      if (!first) s << ", \\\n     ";
      first = false;
      s << "'" << csv_path << "' skip 1 using 2:((" << cond << ") ? $6 : 1/0) with points title '"
        << label << " empirical', \\\n     '" << csv_path << "' skip 1 using 2:((" << cond
        << ") ? $7 : 1/0) with lines title '" << label << " closed form'";
    }
    s << '\n';
  }
  return s.str();
}

void emit_gnuplot(const ResultTable& table, const std::string& csv_path,
                  const std::string& script_path) {
  std::ofstream f(script_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + script_path + "'");
  f << gnuplot_script(table, csv_path);
}

}  // namespace relaync
