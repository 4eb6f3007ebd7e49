// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaync/multihop.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace relaync {
namespace {

cplx qpsk(RngStream& rng) {
  const std::uint64_t b = rng.bits();
  const double s = 1.0 / std::sqrt(2.0);
  return {(b & 1U) ? s : -s, (b & 2U) ? s : -s};
}

void check_chain(const ChannelRealization& ch, int N) {
  if (N < 2) throw std::invalid_argument("2N-hop chain needs N >= 2");
  if (ch.h.size() != static_cast<std::size_t>(N) || ch.g.size() != static_cast<std::size_t>(N))
    throw std::invalid_argument("2N-hop chain: realization size does not match N");
}

}  // namespace

int ChainLayout::relay_number(int p) const {
  if (p < 1 || p > 2 * N - 1) throw std::out_of_range("relay_number: not a relay position");
  return p <= N ? 2 * p - 1 : 2 * (2 * N - p);
}

int ChainLayout::hop_index(int p) const {
  if (p < 0 || p >= links()) throw std::out_of_range("hop_index: bad link");
  return p < N ? 2 * p + 1 : 2 * (2 * N - p);
}

double ChainLayout::node_power(const PowerProfile& profile, int p) const {
  if (p == 0) return profile.P1;
  if (p == 2 * N) return profile.P2;
  return profile.relay_power(relay_number(p));
}

double ChainLayout::link_var(const PowerProfile& profile, int p) const {
  return profile.hop_var(hop_index(p));
}

cplx ChainLayout::link(const ChannelRealization& ch, int p) const {
  if (p < 0 || p >= links()) throw std::out_of_range("link: bad index");
  return p < N ? ch.h[static_cast<std::size_t>(p)]
               : ch.g[static_cast<std::size_t>(2 * N - p - 1)];
}

double MultihopGains::A_h() const {
  double a = 1.0;
  for (int p = 1; p <= N - 1; ++p) a *= alpha[static_cast<std::size_t>(p)];
  return a;
}

double MultihopGains::A_g() const {
  double a = 1.0;
  for (int p = N + 1; p <= 2 * N - 1; ++p) a *= alpha[static_cast<std::size_t>(p)];
  return a;
}

double MultihopGains::all() const { return A_h() * alpha[static_cast<std::size_t>(N)] * A_g(); }

MultihopGains compute_multihop_gains(const PowerProfile& profile, std::size_t L) {
  profile.validate();
  const int N = profile.hop_pairs();
  const ChainLayout lay{N};
  MultihopGains g;
  g.N = N;
  g.alpha.assign(static_cast<std::size_t>(2 * N + 1), 0.0);
  const double nv = profile.sigma_n2;
  for (int p = 1; p <= 2 * N - 1; ++p) {
    const double den = lay.node_power(profile, p - 1) * lay.link_var(profile, p - 1) +
                       lay.node_power(profile, p + 1) * lay.link_var(profile, p) + nv;
    g.alpha[static_cast<std::size_t>(p)] = std::sqrt(lay.node_power(profile, p) / den);
  }

  // Noise collected at the turnaround, relative to sigma_n^2.
  double G = 1.0;
  for (int i = 1; i <= N - 1; ++i) {
    double prod = 1.0;
    for (int j = i; j <= N - 1; ++j) prod *= g.alpha[std::size_t(j)] * g.alpha[std::size_t(j)] * lay.link_var(profile, j);
    G += prod;
  }
  for (int q = N + 1; q <= 2 * N - 1; ++q) {
    double prod = 1.0;
    for (int j = N + 1; j <= q; ++j)
      prod *= g.alpha[std::size_t(j)] * g.alpha[std::size_t(j)] * lay.link_var(profile, j - 1);
    G += prod;
  }
  double Vh = 1.0;
  double Vg = 1.0;
  for (int p = 0; p < N; ++p) Vh *= lay.link_var(profile, p);
  for (int p = N; p < 2 * N; ++p) Vg *= lay.link_var(profile, p);
  const double Ld = double(L);
  const double den = g.A_h() * Vh * Ld * profile.P1 + g.A_g() * Vg * Ld * profile.P2 + 2.0 * nv * G;
  g.alpha_turn_tilde = std::sqrt(Ld * lay.node_power(profile, N) / den);
  return g;
}

MultihopGains unit_multihop_gains(int N) {
  if (N < 2) throw std::invalid_argument("unit_multihop_gains: N >= 2");
  MultihopGains g;
  g.N = N;
  g.alpha.assign(static_cast<std::size_t>(2 * N + 1), 1.0);
  g.alpha.front() = 0.0;
  g.alpha.back() = 0.0;
  g.alpha_turn_tilde = 1.0;
  g.unit = true;
  return g;
}

MultihopNoise multihop_noise_factors(const PowerProfile& profile, const MultihopGains& gains) {
  const int N = gains.N;
  if (profile.hop_pairs() != N) throw std::invalid_argument("multihop_noise_factors: N mismatch");
  const ChainLayout lay{N};
  auto a2 = [&](int p) { return gains.alpha[std::size_t(p)] * gains.alpha[std::size_t(p)]; };
  auto var = [&](int p) { return lay.link_var(profile, p); };

  MultihopNoise f;
  // Backward wave: the noise added at position k reaches T1 through links k-1 .. 0.
  for (int k = 0; k <= N - 1; ++k) {
    double prod = 1.0;
    for (int p = 1; p <= k; ++p) prod *= a2(p) * var(p - 1);
    f.Fb += prod;
  }

  // Forward and turnaround noise, projected onto span(T) and carried back by
  // alpha_turn_tilde A_h prod h. The T1-side links appear twice (|h|^4 moments).
  double Vh = 1.0;
  for (int p = 0; p < N; ++p) Vh *= var(p);
  double g_side = 0.0;
  for (int q = N + 1; q <= 2 * N - 1; ++q) {
    double prod = 1.0;
    for (int j = N + 1; j <= q; ++j) prod *= a2(j) * var(j - 1);
    g_side += prod;
  }
  double acc = Vh * (1.0 + g_side);
  for (int i = 1; i <= N - 1; ++i) {
    double term = 1.0;
    for (int p = 0; p < i; ++p) term *= var(p);
    for (int j = i; j <= N - 1; ++j) term *= a2(j) * 2.0 * var(j) * var(j);
    acc += term;
  }
  const double Ah = gains.A_h();
  f.Ff = gains.alpha_turn_tilde * gains.alpha_turn_tilde * Ah * Ah * acc;
  return f;
}

MultihopPriors multihop_priors(const PowerProfile& profile, int N) {
  const ChainLayout lay{N};
  MultihopPriors pr;
  pr.var1 = 1.0;
  pr.var2 = 1.0;
  for (int p = 0; p < N; ++p) pr.var1 *= 2.0 * lay.link_var(profile, p) * lay.link_var(profile, p);
  for (int p = 0; p < 2 * N; ++p) pr.var2 *= lay.link_var(profile, p);
  return pr;
}

std::pair<cplx, cplx> composite_varpi(const ChannelRealization& ch) {
  cplx ph = 1.0;
  cplx pg = 1.0;
  for (auto v : ch.h) ph *= v;
  for (auto v : ch.g) pg *= v;
  return {ph * ph, ph * pg};
}

cplx true_echo(const ChannelRealization& ch, const MultihopGains& gains, int p) {
  const int N = gains.N;
  const ChainLayout lay{N};
  if (p < 0 || p > 2 * N - 1) throw std::out_of_range("true_echo: bad position");
  cplx e = 0.0;
  if (p - 1 >= 1) {
    const cplx c = lay.link(ch, p - 1);
    e += gains.alpha[std::size_t(p - 1)] * c * c;
  }
  if (p + 1 <= 2 * N - 1) {
    const cplx c = lay.link(ch, p);
    e += gains.alpha[std::size_t(p + 1)] * c * c;
  }
  return e;
}

MultihopTrainingObservation run_training_2Nhop(const ChannelRealization& ch,
                                               const PowerProfile& profile,
                                               const MultihopGains& gains, const TrainingSet& ts,
                                               double sigma_n2, RngStream& rng) {
  const int N = gains.N;
  check_chain(ch, N);
  if (profile.hop_pairs() != N) throw std::invalid_argument("run_training_2Nhop: N mismatch");
  const ChainLayout lay{N};
  const std::size_t L = ts.length();
  auto alpha = [&](int p) { return gains.alpha[std::size_t(p)]; };
  auto c = [&](int p) { return lay.link(ch, p); };
  auto noise = [&]() { return sample_cgauss(L, sigma_n2, rng); };

  // Forward waves. The turnaround's pilot reaches its two neighbours in the
  // same slot as the end-node pilots.
  CVec tx_h = ts.t1;
  for (int p = 1; p <= N - 1; ++p) {
    CVec r = c(p - 1) * tx_h + noise();
    if (p == N - 1) r += c(N - 1) * ts.tr;
    tx_h = alpha(p) * r;
  }
  CVec tx_g = ts.t2;
  for (int q = 2 * N - 1; q >= N + 1; --q) {
    CVec r = c(q) * tx_g + noise();
    if (q == N + 1) r += c(N) * ts.tr;
    tx_g = alpha(q) * r;
  }
  const CVec r_turn = c(N - 1) * tx_h + c(N) * tx_g + noise();

  MultihopTrainingObservation obs;
  const CVec v = pseudo_inverse(ts.Tr()) * r_turn;
  obs.turn_hat[0] = v[0] / gains.A_h();
  obs.turn_hat[1] = v[1] / gains.A_g();
  obs.turn_hat[2] = v[2];

  // Backward wave to T1 with the re-encoded end-node pilots.
  CVec tx = gains.alpha_turn_tilde * (v[0] * ts.t1 + v[1] * ts.t2);
  for (int p = N - 1; p >= 1; --p) tx = alpha(p) * (c(p) * tx + noise());
  obs.z1N = c(0) * tx + noise();
  std::tie(obs.varpi1, obs.varpi2) = composite_varpi(ch);

  // Echo slots: node p sends tr, its relay neighbours forward what they heard.
  obs.echo_hat.assign(static_cast<std::size_t>(2 * N), 0.0);
  for (int p = 0; p <= 2 * N - 1; ++p) {
    if (p == N) {
      obs.echo_hat[std::size_t(p)] = obs.turn_hat[2];
      continue;
    }
    CVec y = noise();
    if (p - 1 >= 1) y += (alpha(p - 1) * c(p - 1)) * (c(p - 1) * ts.tr + noise());
    if (p + 1 <= 2 * N - 1) y += (alpha(p + 1) * c(p)) * (c(p) * ts.tr + noise());
    obs.echo_hat[std::size_t(p)] = dot(ts.tr, y) / ts.Qr;
  }
  return obs;
}

ThetaEstimate ls_estimate_2N(const CVec& z1N, const TrainingSet& ts, const MultihopGains& gains) {
  const CVec v = pseudo_inverse(ts.T()) * z1N;
  const double s = gains.alpha_turn_tilde * gains.A_h();
  return {v[0] / (s * gains.A_h()), v[1] / (s * gains.A_g()), Method::ls};
}

MultihopLmmse::MultihopLmmse(const TrainingSet& ts, const MultihopGains& gains,
                             const MultihopPriors& priors, const MultihopNoise& noise,
                             double sigma_n2) {
  if (!(sigma_n2 > 0.0)) throw std::domain_error("MultihopLmmse: sigma_n^2 must be > 0");
  if (!(priors.var1 > 0.0) || !(priors.var2 > 0.0))
    throw std::domain_error("MultihopLmmse: priors must be > 0");
  const double s = gains.alpha_turn_tilde * gains.A_h();
  const double lam[2] = {s * gains.A_h(), s * gains.A_g()};
  const double d = 1.0 / (sigma_n2 * noise.total());
  const cplx g12 = dot(ts.t1, ts.t2);
  // M = R^{-1} + d Lambda G Lambda; span(T) is an eigenspace of the noise.
  const cplx m00 = 1.0 / priors.var1 + d * lam[0] * lam[0] * ts.Q1;
  const cplx m11 = 1.0 / priors.var2 + d * lam[1] * lam[1] * ts.Q2;
  const cplx m01 = d * lam[0] * lam[1] * g12;
  const cplx m10 = std::conj(m01);
  const cplx det = m00 * m11 - m01 * m10;
  if (std::abs(det) == 0.0) throw SingularMatrixError("MultihopLmmse: singular information");
  const cplx e[2][2] = {{m11 / det, -m01 / det}, {-m10 / det, m00 / det}};
  mse_[0] = e[0][0].real();
  mse_[1] = e[1][1].real();
  w1_ = std::conj(e[0][0] * lam[0] * d) * ts.t1 + std::conj(e[0][1] * lam[1] * d) * ts.t2;
  w2_ = std::conj(e[1][0] * lam[0] * d) * ts.t1 + std::conj(e[1][1] * lam[1] * d) * ts.t2;
}

ThetaEstimate MultihopLmmse::estimate(const CVec& z1N) const {
  return {dot(w1_, z1N), dot(w2_, z1N), Method::lmmse};
}

MultihopCsi perfect_multihop_csi(const ChannelRealization& ch, const MultihopGains& gains) {
  check_chain(ch, gains.N);
  MultihopCsi csi;
  for (int p = 0; p <= 2 * gains.N - 1; ++p) csi.echo.push_back(true_echo(ch, gains, p));
  std::tie(csi.varpi1, csi.varpi2) = composite_varpi(ch);
  csi.estimated = false;
  return csi;
}

MultihopCsi estimated_multihop_csi(const MultihopTrainingObservation& obs,
                                   const ThetaEstimate& varpi) {
  MultihopCsi csi;
  csi.echo = obs.echo_hat;
  csi.varpi1 = varpi.theta1_hat;
  csi.varpi2 = varpi.theta2_hat;
  csi.estimated = true;
  return csi;
}

MultihopExchangeRecord run_data_exchange_2Nhop(const ChannelRealization& ch,
                                               const MultihopGains& gains,
                                               const DataExchangeOptions& opt,
                                               const MultihopCsi& csi, RngStream& rng) {
  const int N = gains.N;
  check_chain(ch, N);
  if (opt.rounds < 1) throw std::invalid_argument("run_data_exchange_2Nhop: rounds must be >= 1");
  if (opt.sigma_n2 < 0.0 || opt.P1 <= 0.0 || opt.P2 <= 0.0)
    throw std::invalid_argument("run_data_exchange_2Nhop: invalid power or noise");
  if (csi.varpi2 == cplx(0.0))
    throw std::invalid_argument("run_data_exchange_2Nhop: CSI has no varpi2 coefficient");
  const ChainLayout lay{N};
  const std::size_t K = opt.rounds;

  MultihopExchangeRecord rec;
  rec.phases = static_cast<int>(K) * 2 * N;
  if (!opt.x1.empty() || !opt.x2.empty()) {
    if (opt.x1.size() != K || opt.x2.size() != K)
      throw std::invalid_argument("run_data_exchange_2Nhop: need one fixed symbol per round");
    rec.x1 = opt.x1;
    rec.x2 = opt.x2;
  } else {
    for (std::size_t k = 0; k < K; ++k) {
      rec.x1.push_back(qpsk(rng));
      rec.x2.push_back(qpsk(rng));
    }
  }

  auto alpha = [&](int p) { return gains.alpha[std::size_t(p)]; };
  auto c = [&](int p) { return lay.link(ch, p); };
  const double sp1 = std::sqrt(opt.P1);
  const double sp2 = std::sqrt(opt.P2);
  const double nv = opt.sigma_n2;
  const cplx v2 = composite_varpi(ch).second;
  const double ah = gains.A_h();
  const double turn = alpha(N) * ah;
  const cplx self_hat = turn * ah * csi.varpi1 * sp1;
  const cplx gain_hat = turn * gains.A_g() * csi.varpi2 * sp2;
  const cplx gain_true = turn * gains.A_g() * v2 * sp2;

  for (std::size_t k = 0; k < K; ++k) {
    cplx tx_h = sp1 * rec.x1[k];
    for (int p = 1; p <= N - 1; ++p) tx_h = alpha(p) * (c(p - 1) * tx_h + rng.cgauss(nv));
    cplx tx_g = sp2 * rec.x2[k];
    for (int q = 2 * N - 1; q >= N + 1; --q) tx_g = alpha(q) * (c(q) * tx_g + rng.cgauss(nv));
    cplx tx = alpha(N) * (c(N - 1) * tx_h + c(N) * tx_g + rng.cgauss(nv));
    for (int p = N - 1; p >= 1; --p) tx = alpha(p) * (c(p) * tx + rng.cgauss(nv));
    const cplx y = c(0) * tx + rng.cgauss(nv);

    const cplx post = y - self_hat * rec.x1[k];
    rec.x2_post.push_back(post);
    rec.x2_desired.push_back(gain_true * rec.x2[k]);
    rec.x2_hat.push_back(post / gain_hat);
  }
  return rec;
}

}  // namespace relaync
