// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaync/simulator.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace relaync {
namespace {

cplx qpsk(RngStream& rng) {
  const std::uint64_t b = rng.bits();
  const double s = 1.0 / std::sqrt(2.0);
  return {(b & 1U) ? s : -s, (b & 2U) ? s : -s};
}

}  // namespace

RelaySelfEstimate ls_estimate_relay(const CVec& r3, const TrainingSet& ts, const Gains& gains) {
  if (r3.size() != ts.length()) throw std::invalid_argument("ls_estimate_relay: length mismatch");
  const CVec v = pseudo_inverse(ts.Tr()) * r3;
  RelaySelfEstimate est;
  est.h_r1_hat[0] = v[0] / gains.alpha1;
  est.h_r1_hat[1] = v[1] / gains.alpha2;
  est.h_r1_hat[2] = v[2];
  return est;
}

FourHopTrainingObservation run_training_round_4hop(const ChannelRealization& ch,
                                                   const Gains& gains, const TrainingSet& ts,
                                                   double sigma_n2, RngStream& rng) {
  if (ch.h.size() != 2 || ch.g.size() != 2)
    throw std::invalid_argument("run_training_round_4hop: needs a 4-hop realization");
  const std::size_t L = ts.length();
  const cplx h1 = ch.h[0], h2 = ch.h[1], g1 = ch.g[0], g2 = ch.g[1];
  const double a1 = gains.alpha1;
  const double a2 = gains.alpha2;

  FourHopTrainingObservation obs;
  // Phase 1: T1, T2 and R3 transmit together.
  obs.r1 = h1 * ts.t1 + h2 * ts.tr + sample_cgauss(L, sigma_n2, rng);
  obs.r2 = g1 * ts.t2 + g2 * ts.tr + sample_cgauss(L, sigma_n2, rng);
  // Phase 2: R1 and R2 amplify and forward to both neighbours.
  obs.z1 = (a1 * h1) * obs.r1 + sample_cgauss(L, sigma_n2, rng);
  obs.z2 = (a2 * g1) * obs.r2 + sample_cgauss(L, sigma_n2, rng);
  obs.r3 = (a1 * h2) * obs.r1 + (a2 * g2) * obs.r2 + sample_cgauss(L, sigma_n2, rng);

  // R3 strips its own pilot and re-encodes the end-node part.
  obs.relay = ls_estimate_relay(obs.r3, ts, gains);
  const CVec clean = (a1 * obs.relay.h_r1_hat[0]) * ts.t1 + (a2 * obs.relay.h_r1_hat[1]) * ts.t2;
  obs.relay_residual = clean - ((a1 * h1 * h2) * ts.t1 + (a2 * g1 * g2) * ts.t2);
  const CVec rebroadcast = gains.alpha3_tilde * clean;

  // Phases 3 and 4: R3 -> R1 -> T1.
  const CVec at_r1 = h2 * rebroadcast + sample_cgauss(L, sigma_n2, rng);
  obs.z3 = (a1 * h1) * at_r1 + sample_cgauss(L, sigma_n2, rng);

  std::tie(obs.theta1, obs.theta2) = composite_theta(ch);
  return obs;
}

ChannelStateInfo perfect_csi(const ChannelRealization& ch, const Gains& gains) {
  ChannelStateInfo csi;
  csi.relay_echo = gains.alpha1 * ch.h[1] * ch.h[1] + gains.alpha2 * ch.g[1] * ch.g[1];
  std::tie(csi.theta1, csi.theta2) = composite_theta(ch);
  csi.h1_sq = ch.h[0] * ch.h[0];
  csi.estimated = false;
  return csi;
}

cplx estimate_h1_sq(const CVec& z1, const TrainingSet& ts, const Gains& gains, double sigma_n2) {
  if (sigma_n2 < 0.0) throw std::domain_error("estimate_h1_sq: negative noise variance");
  const double a1 = gains.alpha1;
  const double s1 = gains.hop_var[0];
  const double prior = 2.0 * s1 * s1;
  // tr is orthogonal to t1, so the h1 h2 component drops out of t1^H z1.
  const cplx proj = dot(ts.t1, z1);
  if (sigma_n2 == 0.0 || prior == 0.0) {
    if (sigma_n2 == 0.0) return proj / (a1 * ts.Q1);
    return 0.0;
  }
  return a1 * prior * proj / (a1 * a1 * prior * ts.Q1 + sigma_n2 * gains.xi);
}

ChannelStateInfo estimated_csi(const FourHopTrainingObservation& obs, const ThetaEstimate& theta,
                               const TrainingSet& ts, const Gains& gains, double sigma_n2) {
  ChannelStateInfo csi;
  csi.relay_echo = obs.relay.echo();
  csi.theta1 = theta.theta1_hat;
  csi.theta2 = theta.theta2_hat;
  csi.h1_sq = estimate_h1_sq(obs.z1, ts, gains, sigma_n2);
  csi.estimated = true;
  return csi;
}

DataExchangeRecord run_data_exchange_4hop(const ChannelRealization& ch, const Gains& gains,
                                          const DataExchangeOptions& opt,
                                          const ChannelStateInfo& csi, RngStream& rng) {
  if (opt.rounds < 1) throw std::invalid_argument("run_data_exchange_4hop: rounds must be >= 1");
  if (ch.h.size() != 2 || ch.g.size() != 2)
    throw std::invalid_argument("run_data_exchange_4hop: needs a 4-hop realization");
  if (opt.sigma_n2 < 0.0 || opt.P1 <= 0.0 || opt.P2 <= 0.0)
    throw std::invalid_argument("run_data_exchange_4hop: invalid power or noise");

  const cplx h1 = ch.h[0], h2 = ch.h[1], g1 = ch.g[0], g2 = ch.g[1];
  const double a1 = gains.alpha1, a2 = gains.alpha2, a3 = gains.alpha3;
  const double at1 = gains.alpha_tilde[0], at2 = gains.alpha_tilde[1];
  const double sp1 = std::sqrt(opt.P1), sp2 = std::sqrt(opt.P2);
  const double nv = opt.sigma_n2;
  const cplx th2 = composite_theta(ch).second;
  const std::size_t R = opt.rounds;

  DataExchangeRecord rec;
  rec.estimated_csi = csi.estimated;
  if (!opt.x1.empty() || !opt.x2.empty()) {
    if (opt.x1.size() != R + 1 || opt.x2.size() != R + 1)
      throw std::invalid_argument("run_data_exchange_4hop: need rounds + 1 fixed symbols");
    rec.x1 = opt.x1;
    rec.x2 = opt.x2;
  } else {
    for (std::size_t j = 0; j <= R; ++j) {
      rec.x1.push_back(qpsk(rng));
      rec.x2.push_back(qpsk(rng));
    }
  }

  // Round 1: the end nodes transmit, R1 and R2 forward with their first-round gains.
  rec.s1 = h1 * sp1 * rec.x1[0] + rng.cgauss(nv);
  rec.s2 = g1 * sp2 * rec.x2[0] + rng.cgauss(nv);
  cplx u = at1 * h2 * rec.s1 + at2 * g2 * rec.s2 + rng.cgauss(nv);
  rec.d3.push_back(u);
  rec.u.push_back(u);

  for (std::size_t j = 1; j <= R; ++j) {
    // Next symbols arrive at R1/R2 together with R3's broadcast of u(j).
    const cplx d1 = h1 * sp1 * rec.x1[j] + a3 * h2 * u + rng.cgauss(nv);
    const cplx d2 = g1 * sp2 * rec.x2[j] + a3 * g2 * u + rng.cgauss(nv);
    const cplx y1 = a1 * h1 * d1 + rng.cgauss(nv);
    const cplx y2 = a2 * g1 * d2 + rng.cgauss(nv);
    rec.d1.push_back(d1);
    rec.d2.push_back(d2);
    rec.y1.push_back(y1);
    rec.y2.push_back(y2);

    // T1 removes x1(j+1) and x1(j), then scales by the x2(j) coefficient.
    const bool first = j == 1;
    const cplx c2_true = first ? a1 * a3 * at2 * th2 : a1 * a2 * a3 * th2;
    const cplx c1_hat = first ? a1 * a3 * at1 * csi.theta1 : a1 * a1 * a3 * csi.theta1;
    const cplx c2_hat = first ? a1 * a3 * at2 * csi.theta2 : a1 * a2 * a3 * csi.theta2;
    const cplx post = y1 - a1 * csi.h1_sq * sp1 * rec.x1[j] - c1_hat * sp1 * rec.x1[j - 1];
    rec.x2_post.push_back(post);
    rec.x2_desired.push_back(c2_true * sp2 * rec.x2[j - 1]);
    rec.x2_hat.push_back(c2_hat == cplx(0.0) ? cplx(0.0) : post / (c2_hat * sp2));

    if (j < R) {
      const cplx d3 = a1 * h2 * d1 + a2 * g2 * d2 + rng.cgauss(nv);
      // R3 removes the echo of its own previous broadcast.
      u = d3 - a3 * csi.relay_echo * u;
      rec.d3.push_back(d3);
      rec.u.push_back(u);
    }
  }
  return rec;
}

double effective_snr_at_t1(const DataExchangeRecord& rec) {
  const std::size_t n = rec.x2_post.size();
  if (n == 0) throw std::invalid_argument("effective_snr_at_t1: no completed exchange");
  const std::size_t start = n >= 2 ? 1 : 0;
  double sig = 0.0;
  double res = 0.0;
  for (std::size_t j = start; j < n; ++j) {
    sig += std::norm(rec.x2_desired[j]);
    res += std::norm(rec.x2_post[j] - rec.x2_desired[j]);
  }
  if (res == 0.0 || sig / res > kAesnrCap) return kAesnrCap;
  return sig / res;
}

double aesnr_closed_form(const ChannelRealization& ch, const Gains& gains, double P2,
                         double sigma_n2) {
  const double a1 = gains.alpha1, a2 = gains.alpha2, a3 = gains.alpha3;
  const double h1 = std::norm(ch.h[0]), h2 = std::norm(ch.h[1]), g2 = std::norm(ch.g[1]);
  const double th2 = std::norm(composite_theta(ch).second);
  const double sig = P2 * a1 * a1 * a2 * a2 * a3 * a3 * th2;
  const double noise =
      sigma_n2 * (1.0 + a1 * a1 * h1 + a1 * a1 * a3 * a3 * h1 * h2 * (a1 * a1 * h2 + a2 * a2 * g2 + 1.0));
  if (noise == 0.0 || sig / noise > kAesnrCap) return kAesnrCap;
  return sig / noise;
}

PointToPointHops point_to_point_hops(const ChannelRealization& ch, const TrainingSet& ts,
                                     double sigma_n2, RngStream& rng) {
  if (ch.h.size() != 2 || ch.g.size() != 2)
    throw std::invalid_argument("point_to_point_hops: needs a 4-hop realization");
  const std::size_t L = ts.length();
  auto hop = [&](cplx c) {
    const CVec rx = c * ts.t1 + sample_cgauss(L, sigma_n2, rng);
    return dot(ts.t1, rx) / ts.Q1;
  };
  PointToPointHops p;
  p.h1 = hop(ch.h[0]);
  p.h2 = hop(ch.h[1]);
  p.g1 = hop(ch.g[0]);
  p.g2 = hop(ch.g[1]);
  return p;
}

ThetaEstimate point_to_point_baseline(const ChannelRealization& ch, const TrainingSet& ts,
                                      double sigma_n2, RngStream& rng) {
  const PointToPointHops p = point_to_point_hops(ch, ts, sigma_n2, rng);
  return {p.h1 * p.h1 * p.h2 * p.h2, p.h1 * p.h2 * p.g1 * p.g2, Method::p2p_baseline};
}

}  // namespace relaync
