// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "relaync/bounds.hpp"
#include "relaync/estimators.hpp"

using namespace relaync;

namespace {

constexpr std::size_t kL = 8;

struct Config {
  PowerProfile profile;
  Gains gains;
  ThetaStatistics stats;
  TrainingSet ts;
};

Config make_config(double snr_db, cplx rho, double q_scale = 1.0) {
  Config c;
  const double p = std::pow(10.0, snr_db / 10.0);
  c.profile = PowerProfile::equal_power(p, 2);
  c.gains = compute_gains(c.profile, kL);
  c.stats = theta_statistics(c.gains);
  c.ts = build_training(kL, rho, q_scale * kL * p, q_scale * kL * p, kL * p);
  return c;
}

Config random_config(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.2, 5.0);
  std::uniform_real_distribution<double> ph(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> mag(0.0, 0.95);
  Config c;
  c.profile = PowerProfile::equal_power(1.0, 2);
  c.profile.P1 = u(gen);
  c.profile.P2 = u(gen);
  for (auto& v : c.profile.Pr) v = u(gen);
  for (auto& v : c.profile.sigma2) v = u(gen);
  c.profile.sigma_n2 = u(gen);
  c.gains = compute_gains(c.profile, kL);
  c.stats = theta_statistics(c.gains);
  c.ts = build_training(kL, std::polar(mag(gen), ph(gen)), kL * u(gen), kL * u(gen), kL * u(gen));
  return c;
}

CrlbCoefficients random_coefficients(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.1, 10.0);
  std::uniform_real_distribution<double> f(0.0, 0.95);
  std::uniform_real_distribution<double> ph(0.0, 6.283185307179586);
  CrlbCoefficients d;
  d.D1 = u(gen);
  d.D3 = u(gen);
  d.D2 = std::polar(f(gen) * std::sqrt(d.D1 * d.D3), ph(gen));
  d.D4 = std::polar(f(gen) * d.D1 * (1.0 - std::norm(d.D2) / (d.D1 * d.D3)), ph(gen));
  return d;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("LMMSE rational forms match the dense covariance route") {
  std::mt19937_64 gen(7);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Config c = random_config(gen);
    const BoundResult a = lmmse_mse_closed_form(c.ts, c.gains, c.stats, c.profile.sigma_n2);
    const BoundResult b = lmmse_mse_matrix(c.ts, c.gains, c.stats, c.profile.sigma_n2);
    worst = std::max({worst, rel(a.first, b.first), rel(a.second, b.second)});
    CHECK(a.first >= 0.0);
    CHECK(a.second >= 0.0);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("LMMSE total MSE via lambda equals e1 + e2") {
  std::mt19937_64 gen(8);
  for (int k = 0; k < 200; ++k) {
    Config c = random_config(gen);
    const double s = lmmse_total_mse_simplified(c.ts, c.gains, c.stats, c.profile.sigma_n2);
    const BoundResult e = lmmse_mse_matrix(c.ts, c.gains, c.stats, c.profile.sigma_n2);
    CHECK(rel(s, e.total()) < 1e-9);
    c.ts = build_training(kL, 0.0, c.ts.Q1, c.ts.Q2, c.ts.Qr);
    const double s0 = lmmse_total_mse_simplified(c.ts, c.gains, c.stats, c.profile.sigma_n2);
    CHECK(rel(s0, lmmse_mse_closed_form(c.ts, c.gains, c.stats, c.profile.sigma_n2).total()) <
          1e-9);
  }
}

TEST_CASE("LMMSE limits") {
  const Config c = make_config(10.0, 0.0);
  const BoundResult noisy = lmmse_mse_closed_form(c.ts, c.gains, c.stats, 1e12);
  CHECK(rel(noisy.first, c.stats.sigma_theta1_2) < 1e-6);
  CHECK(rel(noisy.second, c.stats.sigma_theta2_2) < 1e-6);

  const TrainingSet big = build_training(kL, 0.0, 1e12, c.ts.Q2, c.ts.Qr);
  const BoundResult e = lmmse_mse_closed_form(big, c.gains, c.stats, 1.0);
  CHECK(e.first < 1e-9);
}

TEST_CASE("tau star equals (1 + a)^2") {
  std::mt19937_64 gen(9);
  for (int k = 0; k < 200; ++k) {
    const Config c = random_config(gen);
    const LmmseIntermediates m = lmmse_intermediates(c.ts, c.gains, c.stats, c.profile.sigma_n2);
    CHECK(rel(m.tau_star, (1.0 + m.a) * (1.0 + m.a)) < 1e-12);
  }
}

TEST_CASE("total LMMSE MSE decreases with pilot power") {
  std::mt19937_64 gen(10);
  for (int k = 0; k < 100; ++k) {
    const Config c = random_config(gen);
    const double h = 1e-4 * c.ts.Q1;
    const TrainingSet lo = build_training(kL, c.ts.rho, c.ts.Q1 - h, c.ts.Q2, c.ts.Qr);
    const TrainingSet hi = build_training(kL, c.ts.rho, c.ts.Q1 + h, c.ts.Q2, c.ts.Qr);
    const double d = (lmmse_total_mse_simplified(hi, c.gains, c.stats, c.profile.sigma_n2) -
                      lmmse_total_mse_simplified(lo, c.gains, c.stats, c.profile.sigma_n2)) /
                     (2.0 * h);
    CHECK(d < 0.0);
  }
}

TEST_CASE("orthogonal pilots minimize each LMMSE MSE") {
  for (double snr : {0.0, 10.0, 20.0}) {
    const Config c0 = make_config(snr, 0.0);
    const BoundResult e0 = lmmse_mse_closed_form(c0.ts, c0.gains, c0.stats, 1.0);
    for (double rho : {0.1, 0.5, 0.9}) {
      const Config c = make_config(snr, rho);
      const BoundResult e = lmmse_mse_closed_form(c.ts, c.gains, c.stats, 1.0);
      CHECK(e0.first <= e.first);
      CHECK(e0.second <= e.second);
    }
  }
}

TEST_CASE("CRLB at rho = 0 and the large-Q2 limit") {
  std::mt19937_64 gen(11);
  for (int k = 0; k < 100; ++k) {
    CrlbCoefficients d = random_coefficients(gen);
    d.D2 = 0.0;
    const BoundResult b = crlb_from_coefficients(d);
    CHECK(rel(b.first, d.D1 / (d.D1 * d.D1 - std::norm(d.D4))) < 1e-12);
    CHECK(rel(b.second, 1.0 / d.D3) < 1e-12);
    CHECK(b.valid);
  }
  const Config c = make_config(10.0, 0.0);
  const TrainingSet big = build_training(kL, 0.0, c.ts.Q1, 1e12, c.ts.Qr);
  CHECK(crlb_4hop(big, c.gains, cplx(0.7, 0.2), 1.0).second < 1e-9);
}

TEST_CASE("CRLB rational forms match the FIM inverse") {
  std::mt19937_64 gen(12);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const CrlbCoefficients d = random_coefficients(gen);
    const BoundResult a = crlb_from_coefficients(d);
    const BoundResult b = fim_crlb_oracle(d);
    worst = std::max({worst, rel(a.first, b.first), rel(a.second, b.second)});
  }
  for (int k = 0; k < 500; ++k) {
    const Config c = random_config(gen);
    const cplx th(0.3 + 0.001 * k, -0.4);
    const BoundResult a = crlb_4hop(c.ts, c.gains, th, c.profile.sigma_n2);
    const BoundResult b = fim_crlb_oracle(c.ts, c.gains, {th, cplx(1.0)}, c.profile.sigma_n2);
    worst = std::max({worst, rel(a.first, b.first), rel(a.second, b.second)});
    CHECK(a.valid);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("CRLB scales with the noise variance") {
  const Config c = make_config(10.0, 0.4);
  const cplx th(0.8, 0.5);
  const BoundResult a = crlb_4hop(c.ts, c.gains, th, 1.0);
  const BoundResult b = crlb_4hop(c.ts, c.gains, th, 3.5);
  CHECK(rel(b.first, 3.5 * a.first) < 1e-12);
  CHECK(rel(b.second, 3.5 * a.second) < 1e-12);
  const CrlbCoefficients d1 = crlb_coefficients(c.ts, c.gains, th, 1.0);
  const CrlbCoefficients d2 = crlb_coefficients(c.ts, c.gains, th, 3.5);
  CHECK(rel(d2.D1, d1.D1 / 3.5) < 1e-12);
  CHECK(rel(d2.D3, d1.D3 / 3.5) < 1e-12);
}

TEST_CASE("CRLB derivatives in |D2|^2 are positive and match finite differences") {
  std::mt19937_64 gen(13);
  for (int k = 0; k < 300; ++k) {
    CrlbCoefficients d = random_coefficients(gen);
    const auto [g1, g2] = crlb_rho_derivative(d);
    CHECK(g1 > 0.0);
    CHECK(g2 > 0.0);
    const double y = std::norm(d.D2);
    const double h = 1e-6 * (d.D1 * d.D3);
    const double ph = std::arg(d.D2);
    CrlbCoefficients lo = d;
    CrlbCoefficients hi = d;
    lo.D2 = std::polar(std::sqrt(std::max(y - h, 0.0)), ph);
    hi.D2 = std::polar(std::sqrt(y + h), ph);
    const double step = std::norm(hi.D2) - std::norm(lo.D2);
    const BoundResult a = crlb_from_coefficients(lo);
    const BoundResult b = crlb_from_coefficients(hi);
    CHECK(rel((b.first - a.first) / step, g1) < 1e-5);
    CHECK(rel((b.second - a.second) / step, g2) < 1e-5);
  }
  CrlbCoefficients d = random_coefficients(gen);
  d.D2 = 0.0;
  const auto [g1, g2] = crlb_rho_derivative(d);
  CHECK(std::isfinite(g1));
  CHECK(g1 > 0.0);
  CHECK(g2 > 0.0);

  const Config c = make_config(10.0, 0.5);
  const auto [p1, p2] = crlb_rho_derivative_sign(c.ts, c.gains, cplx(1.0, 0.5), 1.0);
  CHECK(p1 > 0.0);
  CHECK(p2 > 0.0);
}

TEST_CASE("CRLB regime violation is flagged") {
  CrlbCoefficients d;
  d.D1 = 1.0;
  d.D3 = 1.0;
  d.D4 = 1.5;
  CHECK_FALSE(d.regime_ok());
  CHECK_FALSE(crlb_from_coefficients(d).valid);
}

TEST_CASE("finite-N noise factor") {
  AsymptoticParams p;
  p.omega = 1e-9;
  CHECK(finite_N_noise_factor(p, 10, 2.0) == doctest::Approx(2.0).epsilon(1e-8));
  for (double w : {0.1, 0.3, 0.5, 0.7}) {
    p.omega = w;
    CHECK(finite_N_noise_factor(p, 1, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  p.omega = 0.3;
  CHECK(rel(finite_N_noise_factor(p, 40), 1.0 / 0.7) < 1e-6);
  p.omega = 0.5;
  CHECK(rel(finite_N_noise_factor(p, 16), 2.0) < 1e-3);
  // Continuity through the removable singularity.
  for (int N : {2, 5, 9}) {
    AsymptoticParams lo = p, hi = p;
    lo.omega = 0.5 - 1e-7;
    hi.omega = 0.5 + 1e-7;
    const double mid = finite_N_noise_factor(p, N);
    CHECK(rel(finite_N_noise_factor(lo, N), mid) < 1e-5);
    CHECK(rel(finite_N_noise_factor(hi, N), mid) < 1e-5);
  }
  p.omega = 1.0;
  AsymptoticParams near = p;
  near.omega = 1.0 - 1e-7;
  CHECK(rel(finite_N_noise_factor(near, 4), finite_N_noise_factor(p, 4)) < 1e-5);
  CHECK_THROWS_AS(finite_N_noise_factor(p, 0), std::invalid_argument);
}

TEST_CASE("large-N bounds") {
  AsymptoticParams p;
  p.omega = 0.5;
  const TrainingSet ts = build_training(kL, 0.0, 8.0, 8.0, 8.0);
  const auto [mse, crlb] = asymptotic_2Nhop_bounds(p, ts, 1.0);
  CHECK(mse.first == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(mse.first == crlb.first);
  CHECK(mse.second == crlb.second);
  CHECK(mse.valid);
  p.omega = 1.2;
  CHECK_FALSE(asymptotic_2Nhop_bounds(p, ts, 1.0).first.valid);
  const TrainingSet tc = build_training(kL, 0.5, 8.0, 4.0, 8.0);
  p.omega = 0.5;
  const auto pr = asymptotic_2Nhop_bounds(p, tc, 1.0);
  CHECK(pr.first.second == doctest::Approx(1.0 / (0.5 * 0.75 * 4.0)).epsilon(1e-14));
}

TEST_CASE("idealized model: LMMSE below CRLB, equal once priors are flat") {
  const TrainingSet ts = build_training(kL, 0.5, 8.0, 8.0, 8.0);
  AsymptoticParams p;
  p.omega = 0.5;
  p.sigma = std::sqrt(2.0);
  for (int N = 1; N <= 12; ++N) {
    p.N = N;
    const auto [mse, crlb] = idealized_2Nhop_bounds(p, ts, 1.0);
    CHECK(mse.first <= crlb.first);
    CHECK(mse.second <= crlb.second);
  }
  p.N = 12;
  const auto [mse, crlb] = idealized_2Nhop_bounds(p, ts, 1.0);
  CHECK(rel(mse.first, crlb.first) < 1e-6);
}

TEST_CASE("prior-limited regimes") {
  CHECK(classify_prior_regime(0.5) == PriorRegime::vanishing);
  CHECK(classify_prior_regime(std::sqrt(0.5)) == PriorRegime::unit);
  CHECK(classify_prior_regime(0.9) == PriorRegime::unbounded);
  CHECK(prior_limited_mse(40, std::sqrt(0.5)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(prior_limited_mse(40, 0.5) < 1e-10);
  CHECK(to_string(PriorRegime::unit) == "unit");
}

TEST_CASE("2N-hop closed forms agree with the estimator and the 4-hop case") {
  PowerProfile p = PowerProfile::equal_power(3.0, 2, 1.0, 1.0);
  p.sigma2 = {0.7, 1.1, 0.9, 1.3};
  const MultihopGains g = compute_multihop_gains(p, kL);
  const MultihopPriors pr = multihop_priors(p, 2);
  const MultihopNoise f = multihop_noise_factors(p, g);
  const TrainingSet ts = build_training(kL, 0.4, 24.0, 20.0, 24.0);
  const BoundResult m = multihop_lmmse_mse(ts, g, pr, f, p.sigma_n2);
  const MultihopLmmse est(ts, g, pr, f, p.sigma_n2);
  CHECK(rel(m.first, est.mse1()) < 1e-12);
  CHECK(rel(m.second, est.mse2()) < 1e-12);

  const Gains g4 = compute_gains(p, kL);
  const BoundResult e4 = lmmse_mse_closed_form(ts, g4, theta_statistics(g4), p.sigma_n2);
  CHECK(rel(m.first, e4.first) < 1e-9);
  CHECK(rel(m.second, e4.second) < 1e-9);

  const BoundResult c = multihop_crlb(ts, g, f, p.sigma_n2);
  CHECK(m.first <= c.first);
  CHECK(m.second <= c.second);
}

TEST_CASE("to_string of bound kinds") {
  CHECK(to_string(BoundKind::lmmse_mse) == "lmmse-mse");
  CHECK(to_string(BoundKind::asymptotic_crlb) == "asymptotic-crlb");
}
