// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RELAYNC_SIMULATOR_HPP
#define RELAYNC_SIMULATOR_HPP

#include <cstddef>
#include <vector>

#include "relaync/channel.hpp"
#include "relaync/estimators.hpp"
#include "relaync/numeric.hpp"
#include "relaync/rng.hpp"
#include "relaync/training.hpp"

namespace relaync {

// Middle-relay LS estimate of [h1 h2, g1 g2, alpha1 h2^2 + alpha2 g2^2].
struct RelaySelfEstimate {
  cplx h_r1_hat[3] = {0.0, 0.0, 0.0};
  cplx echo() const { return h_r1_hat[2]; }
};

// h_r1 = Lambda0^{-1} T_r^+ r3 with Lambda0 = diag(alpha1, alpha2, 1).
// Throws SingularMatrixError when [t1, t2, tr] is rank deficient.
RelaySelfEstimate ls_estimate_relay(const CVec& r3, const TrainingSet& ts, const Gains& gains);

struct FourHopTrainingObservation {
  CVec r1;  // at R1: h1 t1 + h2 tr + n
  CVec r2;  // at R2: g1 t2 + g2 tr + n
  CVec z1;  // at T1: alpha1 h1 r1 + n
  CVec z2;  // at T2: alpha2 g1 r2 + n
  CVec r3;  // at R3: alpha1 h2 r1 + alpha2 g2 r2 + n
  CVec z3;  // at T1 after the re-encoded broadcast
  RelaySelfEstimate relay;
  // alpha1 h0_hat t1 + alpha2 h1_hat t2 minus its noiseless value; the
  // noise R3 re-broadcasts, before the alpha3_tilde scaling.
  CVec relay_residual;
  cplx theta1 = 0.0;
  cplx theta2 = 0.0;
};

// One training round: both end nodes send pilots, R3 adds tr, estimates its
// self-interference by LS, strips it and re-broadcasts the end-node part.
// sigma_n2 = 0 runs the protocol noiselessly.
FourHopTrainingObservation run_training_round_4hop(const ChannelRealization& ch,
                                                   const Gains& gains, const TrainingSet& ts,
                                                   double sigma_n2, RngStream& rng);

// Channel knowledge used during data exchange.
struct ChannelStateInfo {
  cplx relay_echo = 0.0;  // alpha1 h2^2 + alpha2 g2^2, used by R3
  cplx theta1 = 0.0;      // h1^2 h2^2, used by T1
  cplx theta2 = 0.0;      // h1 h2 g1 g2, used by T1
  cplx h1_sq = 0.0;       // h1^2, used by T1
  bool estimated = false;
};

ChannelStateInfo perfect_csi(const ChannelRealization& ch, const Gains& gains);

// T1's LMMSE estimate of h1^2 from z1 = alpha1 (h1^2 t1 + h1 h2 tr) + noise,
// with prior variance 2 sigma1^4 and noise sigma_n^2 xi. Reduces to LS when
// sigma_n2 = 0.
cplx estimate_h1_sq(const CVec& z1, const TrainingSet& ts, const Gains& gains, double sigma_n2);

ChannelStateInfo estimated_csi(const FourHopTrainingObservation& obs, const ThetaEstimate& theta,
                               const TrainingSet& ts, const Gains& gains, double sigma_n2);

struct DataExchangeOptions {
  std::size_t rounds = 1;  // completed exchanges
  double P1 = 1.0;         // transmit power of T1 data symbols
  double P2 = 1.0;
  double sigma_n2 = 1.0;
  // Optional fixed unit-power symbols (rounds + 1 each); QPSK draws otherwise.
  std::vector<cplx> x1;
  std::vector<cplx> x2;
};

// Per-round signals of the pipelined exchange. Index j - 1 holds round j.
struct DataExchangeRecord {
  std::vector<cplx> x1;      // unit-power QPSK, rounds + 1 entries
  std::vector<cplx> x2;
  cplx s1 = 0.0;             // first-round receptions at R1 and R2
  cplx s2 = 0.0;
  std::vector<cplx> d1;      // d1(j + 1): R1 reception while R3 broadcasts u(j)
  std::vector<cplx> d2;
  std::vector<cplx> d3;      // d3(j): R3 reception before echo cancellation
  std::vector<cplx> u;       // u(j): R3 signal after echo cancellation
  std::vector<cplx> y1;      // y1(j) at T1
  std::vector<cplx> y2;      // y2(j) at T2
  std::vector<cplx> x2_desired;  // true coefficient times sqrt(P2) x2(j)
  std::vector<cplx> x2_post;     // y1(j) after T1 cancels its own symbols
  std::vector<cplx> x2_hat;      // post-cancellation soft estimate of x2(j)
  bool estimated_csi = false;
};

DataExchangeRecord run_data_exchange_4hop(const ChannelRealization& ch, const Gains& gains,
                                          const DataExchangeOptions& opt,
                                          const ChannelStateInfo& csi, RngStream& rng);

// Sum of desired power over sum of residual power after cancellation, on the
// steady-state rounds (j >= 2 when available). Capped at kAesnrCap.
inline constexpr double kAesnrCap = 1e30;  // 300 dB
double effective_snr_at_t1(const DataExchangeRecord& rec);

// Perfect-CSI steady-state value for one realization:
// P2 |alpha1 alpha2 alpha3 theta2|^2 / (sigma_n^2 [1 + alpha1^2 |h1|^2
//   + alpha1^2 alpha3^2 |h1 h2|^2 (alpha1^2 |h2|^2 + alpha2^2 |g2|^2 + 1)]).
double aesnr_closed_form(const ChannelRealization& ch, const Gains& gains, double P2,
                         double sigma_n2);

// Dedicated single-hop LS rounds for h1, h2, g1, g2 with pilot t1.
struct PointToPointHops {
  cplx h1 = 0.0;
  cplx h2 = 0.0;
  cplx g1 = 0.0;
  cplx g2 = 0.0;
};
PointToPointHops point_to_point_hops(const ChannelRealization& ch, const TrainingSet& ts,
                                     double sigma_n2, RngStream& rng);
ThetaEstimate point_to_point_baseline(const ChannelRealization& ch, const TrainingSet& ts,
                                      double sigma_n2, RngStream& rng);

// Phase accounting per completed two-way exchange.
struct SpectralEfficiency {
  int point_to_point_phases = 8;
  int network_coded_phases = 4;
  int steady_state_phases = 2;
  double ratio() const { return double(point_to_point_phases) / network_coded_phases; }
  double steady_state_ratio() const { return double(point_to_point_phases) / steady_state_phases; }
};

}  // namespace relaync

#endif  // RELAYNC_SIMULATOR_HPP
