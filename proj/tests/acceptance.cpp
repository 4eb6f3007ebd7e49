// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Every tolerance, trial count and seed is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "relaync/bounds.hpp"
#include "relaync/estimators.hpp"
#include "relaync/experiments.hpp"
#include "relaync/multihop.hpp"
#include "relaync/simulator.hpp"

using namespace relaync;

namespace {

// ---- pinned settings ------------------------------------------------------
constexpr std::size_t kL = 8;
constexpr std::size_t kTrials = 10000;
constexpr std::uint64_t kSeed = 20260101;

constexpr double kC1DeskRelTol = 0.05;
constexpr std::size_t kC1FullTrials = 100000;
constexpr double kC1FullRelTol = 0.03;
constexpr double kC3GridSlack = 1e-9;
constexpr std::size_t kC3Instances = 1000;
constexpr std::size_t kC3GridPoints = 100000;
constexpr double kC3DerivRelTol = 1e-5;
constexpr std::size_t kC4Configs = 1000;
constexpr double kC4RelTol = 1e-8;
constexpr double kC5Low = 0.95;
constexpr double kC5High = 1.5;
constexpr double kC7Tol = 1e-9;
constexpr std::size_t kC7Rounds = 40;
constexpr double kC8RelTol = 0.10;
constexpr double kC8FactorRelTol = 1e-3;
constexpr double kC9RelTol = 0.05;
constexpr double kC9Sigma2 = 2.0;
constexpr double kC9Omega = 0.5;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[192];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel_err(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

// The default 4-hop setup at a given SNR: equal powers, unit variances, L = 8.
struct FourHop {
  PowerProfile profile;
  Gains gains;
  TrainingSet ts;
};

FourHop fourhop(double snr_db, double rho, double q_scale = 1.0) {
  const double P = std::pow(10.0, snr_db / 10.0);
  FourHop f;
  f.profile = PowerProfile::equal_power(P, 2);
  f.gains = compute_gains(f.profile, kL);
  const double Q = q_scale * double(kL) * P;
  f.ts = build_training(kL, rho, Q, Q, Q);
  return f;
}

ExperimentConfig experiment(Scenario s, std::vector<double> snr, std::vector<double> rho) {
  ExperimentConfig c;
  c.scenario = s;
  c.snr_db = std::move(snr);
  c.rho = std::move(rho);
  c.trials = kTrials;
  c.seed = kSeed;
  c.workers = 1;
  return c;
}

const ResultRow* find_row(const ResultTable& t, const std::string& metric, double snr, double rho,
                          int n_hops = 4) {
  for (const ResultRow& r : t.rows) {
    if (r.metric == metric && r.snr_db == snr && r.rho == rho && r.n_hops == n_hops) return &r;
  }
  return nullptr;
}

// ---- 1: LMMSE empirical vs closed form -----------------------------------
// Worst relative error over the 12 (metric, SNR, rho) values; rows lacking a
// closed form count as infinite.
double criterion1_worst(std::size_t trials, std::string* where) {
  ExperimentConfig c = experiment(Scenario::fourhop_lmmse, {0.0, 10.0, 20.0}, {0.0, 0.5});
  c.trials = trials;
  const ResultTable t = run_experiment(c);
  double worst = t.rows.size() == 12 ? 0.0 : std::numeric_limits<double>::infinity();
  for (const ResultRow& r : t.rows) {
    const double e = r.closed_form ? rel_err(r.empirical, *r.closed_form)
                                   : std::numeric_limits<double>::infinity();
    if (e > worst) {
      worst = e;
      *where = r.metric + fmt(" snr=%g rho=%g", r.snr_db, r.rho);
    }
  }
  return worst;
}

// The squared errors are heavy tailed (fourth-order products of Gaussians), so
// at 1e4 trials each value carries a 2.5-3% standard error and the 5% desk
// check is underpowered. The verdict uses the full profile (1e5 trials, 3%);
// the desk profile is reported alongside.
Outcome criterion1() {
  Outcome o;
  std::string desk_where, full_where;
  const double desk = criterion1_worst(kTrials, &desk_where);
  std::printf("  info: desk profile %zu trials: worst rel err %.4f at %s (tol %.2f) %s\n", kTrials,
              desk, desk_where.c_str(), kC1DeskRelTol, desk <= kC1DeskRelTol ? "PASS" : "FAIL");
  const double full = criterion1_worst(kC1FullTrials, &full_where);
  o.require(full <= kC1FullRelTol, fmt("full profile rel err %.4f", full) + " at " + full_where);
  if (o.pass) {
    o.detail = fmt("full profile worst rel err %.4f over 12 values (tol %.2f)", full,
                   kC1FullRelTol) + " at " + full_where;
  }
  return o;
}

// ---- 2: orthogonal training minimizes MSE and both CRLBs -----------------
Outcome criterion2() {
  Outcome o;
  RngStream rng(kSeed, 2);
  std::vector<cplx> thetas;
  for (int k = 0; k < 3; ++k) thetas.push_back(rng.cgauss(2.0) * rng.cgauss(2.0));
  std::size_t compared = 0;
  for (double snr : {0.0, 15.0, 30.0}) {
    for (double qs : {0.5, 1.0, 4.0}) {
      for (const cplx th1 : thetas) {
        const FourHop base = fourhop(snr, 0.0, qs);
        const ThetaStatistics st = theta_statistics(base.gains);
        const BoundResult m0 = lmmse_mse_closed_form(base.ts, base.gains, st, 1.0);
        const BoundResult c0 = crlb_4hop(base.ts, base.gains, th1, 1.0);
        for (double rho : {0.3, 0.6, 0.9}) {
          const FourHop f = fourhop(snr, rho, qs);
          const BoundResult m = lmmse_mse_closed_form(f.ts, f.gains, st, 1.0);
          const BoundResult c = crlb_4hop(f.ts, f.gains, th1, 1.0);
          const std::string at = fmt(" snr=%g qscale=%g rho=%g", snr, qs, rho);
          o.require(m0.first <= m.first && m0.second <= m.second, "LMMSE MSE" + at);
          o.require(c0.first <= c.first && c0.second <= c.second, "CRLB" + at);
          o.require(c0.valid && c.valid, "CRLB outside its regime" + at);
          compared += 4;
        }
      }
    }
  }
  if (o.pass) o.detail = fmt("rho=0 minimal in all %g comparisons", double(compared));
  return o;
}

// ---- 5: ML MSE against the CRLB at high SNR ------------------------------
Outcome criterion5() {
  Outcome o;
  const ResultTable t = run_experiment(experiment(Scenario::fourhop_ml, {30.0}, {0.0}));
  std::string ratios;
  for (const char* m : {"mse_theta1", "mse_theta2"}) {
    const ResultRow* r = find_row(t, m, 30.0, 0.0);
    if (r == nullptr || !r->closed_form) {
      o.require(false, std::string("missing row ") + m);
      continue;
    }
    const double ratio = r->empirical / *r->closed_form;
    ratios += std::string(" ") + m + fmt("=%.4f", ratio);
    o.require(ratio >= kC5Low && ratio <= kC5High, std::string(m) + fmt(" ratio %.4f", ratio));
  }
  if (o.pass) o.detail = "MSE/CRLB" + ratios + fmt(" in [%.2f, %.2f]", kC5Low, kC5High);
  return o;
}

// ---- 6: network-coded LMMSE beats point-to-point at high SNR -------------
Outcome criterion6() {
  Outcome o;
  const ResultTable t = run_experiment(experiment(Scenario::fourhop_baseline, {20.0}, {0.0}));
  const ResultRow* lm = find_row(t, "mse_theta1_lmmse", 20.0, 0.0);
  const ResultRow* pp = find_row(t, "mse_theta1_p2p", 20.0, 0.0);
  if (lm == nullptr || pp == nullptr) {
    o.require(false, "missing baseline rows");
    return o;
  }
  o.require(lm->empirical < pp->empirical, "LMMSE not below point-to-point");
  o.detail = fmt("LMMSE %.5g vs point-to-point %.5g", lm->empirical, pp->empirical);
  return o;
}

}  // namespace

namespace {

// ---- 3: closed-form ML amplitude vs a dense grid -------------------------
Outcome criterion3() {
  Outcome o;
  RngStream rng(kSeed, 3);
  double worst_gap = -std::numeric_limits<double>::infinity();
  double worst_deriv = 0.0;
  std::size_t edge = 0;
  for (std::size_t i = 0; i < kC3Instances; ++i) {
    const double snr = 30.0 * rng.uniform();
    const double rho = 0.95 * rng.uniform();
    const FourHop f = fourhop(snr, rho);
    const ChannelRealization ch = draw_channels(f.profile, 2, rng);
    const FourHopTrainingObservation obs =
        run_training_round_4hop(ch, f.gains, f.ts, 1.0, rng);
    const MlEstimator ml(f.ts, f.gains, 1.0);
    MlIntermediates info;
    ml.estimate(obs.z3, &info);
    const GridOracleResult grid = ml_grid_oracle(ml, obs.z3, kC3GridPoints);
    if (grid.touched_upper_edge) ++edge;
    const double gap = ml.objective(info.a_hat, obs.z3) - grid.f_best;
    worst_gap = std::max(worst_gap, gap);
    o.require(gap <= kC3GridSlack, fmt("instance %g: f(a_hat) - grid min = %.3g", double(i), gap));

    // Away from the stationary point, where a relative comparison is meaningful.
    const double lo = info.a_hat > 0.0 ? 0.3 * info.a_hat : 0.5;
    const double hi = 3.0 * info.a_hat + 0.5;
    for (double a : {lo, hi}) {
      const double h = 1e-6 * (1.0 + a);
      const double fd = (ml.objective(a + h, obs.z3) - ml.objective(a - h, obs.z3)) / (2.0 * h);
      const double e = rel_err(ml.objective_derivative(a, obs.z3), fd);
      worst_deriv = std::max(worst_deriv, e);
      o.require(e <= kC3DerivRelTol,
                fmt("instance %g: derivative rel err %.3g at a=%.4g", double(i), e, a));
    }
  }
  if (o.pass) {
    o.detail = fmt("max f(a_hat)-grid min %.3g, max derivative rel err %.3g", worst_gap,
                   worst_deriv) +
               fmt(", %g instances hit the grid edge", double(edge));
  }
  return o;
}

// ---- 4: rational CRLB vs FIM inverse -------------------------------------
Outcome criterion4() {
  Outcome o;
  RngStream rng(kSeed, 4);
  double worst = 0.0;
  for (std::size_t i = 0; i < kC4Configs; ++i) {
    const double P = std::pow(10.0, -1.0 + 4.5 * rng.uniform());
    const double sigma2 = 0.5 + 1.5 * rng.uniform();
    const double sigma_n2 = 0.2 + 1.8 * rng.uniform();
    const double rho = 0.95 * rng.uniform();
    const PowerProfile p = PowerProfile::equal_power(P, 2, sigma2, sigma_n2);
    const Gains g = compute_gains(p, kL);
    const double Q = double(kL) * P * (0.25 + 4.0 * rng.uniform());
    const TrainingSet ts = build_training(kL, rho, Q, Q, Q);
    const ChannelRealization ch = draw_channels(p, 2, rng);
    const cplx th1 = ch.h[0] * ch.h[0] * ch.h[1] * ch.h[1];
    const cplx th2 = ch.h[0] * ch.h[1] * ch.g[0] * ch.g[1];
    const BoundResult rational = crlb_4hop(ts, g, th1, sigma_n2);
    BoundResult oracle;
    try {
      oracle = fim_crlb_oracle(ts, g, {th1, th2}, sigma_n2);
    } catch (const std::exception& e) {
      o.require(false, fmt("config %g: ", double(i)) + e.what());
      continue;
    }
    const double e = std::max(rel_err(rational.first, oracle.first),
                              rel_err(rational.second, oracle.second));
    worst = std::max(worst, e);
    o.require(e <= kC4RelTol, fmt("config %g: rel err %.3g", double(i), e));
  }
  if (o.pass) o.detail = fmt("max rel err %.3g over %g configs", worst, double(kC4Configs));
  return o;
}

// ---- 7: noiseless protocols decode exactly -------------------------------
double worst_symbol_error(const std::vector<cplx>& hat, const std::vector<cplx>& truth) {
  double worst = 0.0;
  for (std::size_t k = 0; k < hat.size(); ++k) worst = std::max(worst, std::abs(hat[k] - truth[k]));
  return worst;
}

Outcome criterion7() {
  Outcome o;
  RngStream rng(kSeed, 7);
  double worst = 0.0;
  DataExchangeOptions opt;
  opt.rounds = kC7Rounds;
  opt.sigma_n2 = 0.0;

  for (double rho : {0.0, 0.5}) {
    const FourHop f = fourhop(10.0, rho);
    opt.P1 = opt.P2 = f.profile.P1;
    const ChannelRealization ch = draw_channels(f.profile, 2, rng);
    const auto obs = run_training_round_4hop(ch, f.gains, f.ts, 0.0, rng);
    const ChannelStateInfo trained =
        estimated_csi(obs, ls_estimate(obs.z3, f.ts, f.gains), f.ts, f.gains, 0.0);
    for (const ChannelStateInfo& csi : {perfect_csi(ch, f.gains), trained}) {
      const auto rec = run_data_exchange_4hop(ch, f.gains, opt, csi, rng);
      const double e = worst_symbol_error(rec.x2_hat, rec.x2);
      worst = std::max(worst, e);
      o.require(rec.x2_hat.size() == kC7Rounds && e < kC7Tol,
                fmt("4-hop rho=%g error %.3g", rho, e) + (csi.estimated ? " (trained)" : ""));
    }
  }

  for (int N : {2, 4, 8}) {
    const PowerProfile p = PowerProfile::equal_power(10.0, N);
    const MultihopGains g = compute_multihop_gains(p, kL);
    const TrainingSet ts = build_training(kL, 0.5, 80.0, 80.0, 80.0);
    opt.P1 = p.P1;
    opt.P2 = p.P2;
    const ChannelRealization ch = draw_channels(p, N, rng);
    const auto obs = run_training_2Nhop(ch, p, g, ts, 0.0, rng);
    const MultihopCsi trained = estimated_multihop_csi(obs, ls_estimate_2N(obs.z1N, ts, g));
    for (const MultihopCsi& csi : {perfect_multihop_csi(ch, g), trained}) {
      const auto rec = run_data_exchange_2Nhop(ch, g, opt, csi, rng);
      const double e = worst_symbol_error(rec.x2_hat, rec.x2);
      worst = std::max(worst, e);
      o.require(rec.x2_hat.size() == kC7Rounds && e < kC7Tol,
                fmt("2N-hop N=%g error %.3g", double(N), e));
    }
  }
  if (o.pass) o.detail = fmt("max symbol error %.3g (tol %.0e)", worst, kC7Tol);
  return o;
}

}  // namespace

namespace {

// ---- 8: 2N-hop large-N behaviour -----------------------------------------
Outcome criterion8() {
  Outcome o;
  constexpr double omega = 0.5;
  constexpr double rho = 0.0;
  ExperimentConfig c = experiment(Scenario::asymptotic_check, {0.0}, {rho});
  c.n_hops = {8};
  c.omega = omega;
  const ResultTable t = run_experiment(c);
  const ResultRow* r = find_row(t, "mse_varpi1_ls", 0.0, rho, 16);
  // SNR 0 dB: P = 1 and Q1 = L P.
  const double Q1 = double(kL);
  const double target = 1.0 / ((1.0 - omega) * (1.0 - rho * rho) * Q1);
  if (r == nullptr) {
    o.require(false, "missing mse_varpi1_ls row at N=8");
    return o;
  }
  const double e = rel_err(r->empirical, target);
  o.require(e <= kC8RelTol, fmt("N=8 MSE %.5g vs %.5g", r->empirical, target));

  AsymptoticParams params;
  params.omega = omega;
  params.N = 16;
  const double eta16 = finite_N_noise_factor(params, 16);
  const double ef = rel_err(eta16, 1.0 / (1.0 - omega));
  o.require(ef <= kC8FactorRelTol, fmt("N=16 noise factor %.8g rel err %.3g", eta16, ef));
  if (o.pass) {
    o.detail = fmt("N=8 MSE %.5g vs %.5g (rel err %.4f)", r->empirical, target, e) +
               fmt(", N=16 factor rel err %.3g", ef);
  }
  return o;
}

// ---- 9: LMMSE vs CRLB as the chain grows ---------------------------------
std::pair<BoundResult, BoundResult> idealized(double sigma2, int N, double rho) {
  AsymptoticParams params;
  params.omega = kC9Omega;
  params.sigma = std::sqrt(sigma2);
  // Unit hop gains, as in the large-N analysis; omega only sets the noise factor.
  params.kappa = 1.0;
  params.N = N;
  // SNR 0 dB: Q = L.
  const double Q = double(kL);
  return idealized_2Nhop_bounds(params, build_training(kL, rho, Q, Q, Q), 1.0);
}

Outcome criterion9() {
  Outcome o;
  double worst = 0.0;
  for (double rho : {0.0, 0.5}) {
    const auto [m2, c2] = idealized(kC9Sigma2, 2, rho);
    o.require(m2.first <= c2.first && m2.second <= c2.second,
              fmt("N=2 rho=%g: MSE above CRLB", rho));
    const auto [m8, c8] = idealized(kC9Sigma2, 8, rho);
    const double e = std::max(rel_err(m8.first, c8.first), rel_err(m8.second, c8.second));
    worst = std::max(worst, e);
    o.require(e <= kC9RelTol, fmt("N=8 rho=%g: rel gap %.4f", rho, e));
  }
  // Unit channel variance for reference: the varpi2 prior stays at 1 there.
  for (int N : {2, 8}) {
    const auto [m, c] = idealized(1.0, N, 0.0);
    std::printf("  info: sigma^2=1 N=%d rho=0 MSE %.5g CRLB %.5g\n", N, m.first, c.first);
  }
  if (o.pass) o.detail = fmt("sigma^2=%g: MSE <= CRLB at N=2, max gap %.4f at N=8", kC9Sigma2, worst);
  return o;
}

// ---- 10: byte-identical CSV across worker counts -------------------------
std::string slurp(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) return {};
  std::string s;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) s.append(buf, n);
  std::fclose(f);
  return s;
}

Outcome criterion10() {
  Outcome o;
  for (Scenario s : all_scenarios()) {
    ExperimentConfig c = experiment(s, {0.0, 20.0}, {0.0, 0.5});
    c.trials = 300;
    c.n_hops = {2, 4};
    std::string reference;
    for (std::size_t workers : {1, 4, 8, 1}) {
      c.workers = workers;
      const std::string path = "acceptance_c10.csv";
      emit_csv(run_experiment(c), path);
      const std::string bytes = slurp(path);
      std::remove(path.c_str());
      if (reference.empty()) reference = bytes;
      o.require(!bytes.empty() && bytes == reference,
                std::string(to_string(s)) + fmt(": CSV differs at %g workers", double(workers)));
    }
  }
  if (o.pass) o.detail = "6 scenarios, workers 1/4/8 and a rerun give identical bytes";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "LMMSE closed-form fidelity", criterion1},
      {2, "orthogonal training optimality", criterion2},
      {3, "ML minimizer vs brute force", criterion3},
      {4, "CRLB two-route equality", criterion4},
      {5, "CRLB attainment at 30 dB", criterion5},
      {6, "baseline comparison at 20 dB", criterion6},
      {7, "noiseless protocol identity", criterion7},
      {8, "2N-hop asymptotics", criterion8},
      {9, "LMMSE/CRLB crossover", criterion9},
      {10, "determinism across workers", criterion10},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failed;
    std::printf("criterion %2d %s: %s; %s (%.1fs)\n", c.id, out.pass ? "PASS" : "FAIL", c.name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
