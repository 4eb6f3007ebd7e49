// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaync/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace relaync {

void PowerProfile::validate() const {
  if (sigma2.size() < 4 || sigma2.size() % 2 != 0) {
    throw std::invalid_argument("profile: need 2N hop variances with N >= 2");
  }
  if (Pr.size() != sigma2.size() - 1) {
    throw std::invalid_argument("profile: need 2N-1 relay powers");
  }
  if (!(P1 > 0.0) || !(P2 > 0.0)) throw std::invalid_argument("profile: end-node power <= 0");
  for (double p : Pr)
    if (!(p > 0.0)) throw std::invalid_argument("profile: relay power <= 0");
  // Zero variances are allowed so degenerate channels can be exercised.
  for (double s : sigma2)
    if (!(s >= 0.0)) throw std::invalid_argument("profile: negative hop variance");
  if (!(sigma_n2 >= 0.0)) throw std::invalid_argument("profile: negative noise variance");
}

PowerProfile PowerProfile::equal_power(double P, int N, double sigma2, double sigma_n2) {
  if (N < 2) throw std::invalid_argument("equal_power: N must be >= 2");
  PowerProfile p;
  p.P1 = P;
  p.P2 = P;
  p.Pr.assign(static_cast<std::size_t>(2 * N - 1), P);
  p.sigma2.assign(static_cast<std::size_t>(2 * N), sigma2);
  p.sigma_n2 = sigma_n2;
  return p;
}

ChannelRealization draw_channels(const PowerProfile& profile, int N, RngStream& rng) {
  if (N < 2) throw std::invalid_argument("draw_channels: N must be >= 2");
  if (profile.hop_pairs() != N) throw std::invalid_argument("draw_channels: profile is not for N");
  ChannelRealization ch;
  ch.h.resize(static_cast<std::size_t>(N));
  ch.g.resize(static_cast<std::size_t>(N));
  for (int i = 1; i <= N; ++i) {
    ch.h[static_cast<std::size_t>(i - 1)] = rng.cgauss(profile.hop_var(2 * i - 1));
    ch.g[static_cast<std::size_t>(i - 1)] = rng.cgauss(profile.hop_var(2 * i));
  }
  return ch;
}

ChannelRealization conjugate(const ChannelRealization& ch) {
  ChannelRealization out = ch;
  for (auto& v : out.h) v = std::conj(v);
  for (auto& v : out.g) v = std::conj(v);
  return out;
}

Gains compute_gains(const PowerProfile& profile, std::size_t L) {
  profile.validate();
  if (profile.hop_pairs() != 2) throw std::invalid_argument("compute_gains: 4-hop profile required");
  const double s1 = profile.hop_var(1);
  const double s2 = profile.hop_var(2);
  const double s3 = profile.hop_var(3);
  const double s4 = profile.hop_var(4);
  const double pr1 = profile.relay_power(1);
  const double pr2 = profile.relay_power(2);
  const double pr3 = profile.relay_power(3);
  const double n2 = profile.sigma_n2;
  const double l = double(L);

  Gains g;
  g.hop_var = {s1, s2, s3, s4};
  g.alpha_tilde[0] = std::sqrt(pr1 / (profile.P1 * s1 + n2));
  g.alpha_tilde[1] = std::sqrt(pr2 / (profile.P2 * s2 + n2));
  g.alpha1 = std::sqrt(pr1 / (profile.P1 * s1 + pr3 * s3 + n2));
  g.alpha2 = std::sqrt(pr2 / (profile.P2 * s2 + pr3 * s4 + n2));
  g.alpha3 = std::sqrt(pr3 / (pr1 * s3 + pr2 * s4 + n2));

  const double a1 = g.alpha1;
  const double a2 = g.alpha2;
  // Re-encoding gain as published: the signal terms carry alpha_i, not
  // alpha_i^2, so this is a fixed scale rather than an exact power match.
  const double residual = 2.0 * (a1 * a1 * s3 + a2 * a2 * s4 + 1.0) * n2;
  g.alpha3_tilde = std::sqrt(l * pr3 / (a1 * s1 * s3 * l * profile.P1 +
                                        a2 * s2 * s4 * l * profile.P2 + residual));

  g.xi = 1.0 + a1 * a1 * s1;
  g.eps = 2.0 * a1 * a1 * s3 + a2 * a2 * s4 + 1.0;
  g.a0 = a1 * a1 * g.alpha3_tilde * g.alpha3_tilde * g.eps / g.xi;
  return g;
}

ThetaStatistics theta_statistics(const Gains& gains) {
  const auto& s = gains.hop_var;
  ThetaStatistics st;
  st.sigma_theta1_2 = 4.0 * s[0] * s[0] * s[2] * s[2];
  st.sigma_theta2_2 = s[0] * s[1] * s[2] * s[3];
  return st;
}

std::pair<cplx, cplx> composite_theta(const ChannelRealization& ch) {
  if (ch.h.size() < 2 || ch.g.size() < 2) throw std::invalid_argument("composite_theta: N < 2");
  const cplx h1 = ch.h[0];
  const cplx h2 = ch.h[1];
  return {h1 * h1 * h2 * h2, h1 * h2 * ch.g[0] * ch.g[1]};
}

double noise_projection_weight(const Gains& gains) {
  const double a1 = gains.alpha1;
  const double at = gains.alpha3_tilde;
  return a1 * a1 * at * at * gains.hop_var[0] * gains.hop_var[2] * gains.eps / gains.xi;
}

CMat noise_cov_z3_lmmse(const TrainingSet& ts, const Gains& gains, double sigma_n2) {
  const CMat pt = projection_onto_columns(ts.T());
  const double c = gains.alpha1 * gains.alpha1 * gains.alpha3_tilde * gains.alpha3_tilde *
                   gains.hop_var[0] * gains.hop_var[2] * gains.eps;
  CMat r = cplx(gains.xi) * CMat::identity(ts.length()) + cplx(c) * pt;
  r *= sigma_n2;
  return r;
}

CMat noise_cov_z3_inverse(const TrainingSet& ts, const Gains& gains, double sigma_n2) {
  if (!(sigma_n2 > 0.0)) throw SingularMatrixError("noise_cov_z3_inverse: zero noise");
  const CMat pt = projection_onto_columns(ts.T());
  const double a = noise_projection_weight(gains);
  CMat r = CMat::identity(ts.length()) - cplx(a / (1.0 + a)) * pt;
  r *= 1.0 / (sigma_n2 * gains.xi);
  return r;
}

}  // namespace relaync
