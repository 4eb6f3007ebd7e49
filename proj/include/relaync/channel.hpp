// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RELAYNC_CHANNEL_HPP
#define RELAYNC_CHANNEL_HPP

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "relaync/numeric.hpp"
#include "relaync/rng.hpp"
#include "relaync/training.hpp"

namespace relaync {

// Powers and variances for a chain with N hop pairs (2N hops, 2N-1 relays).
//   Pr[k-1]     = power of relay R_k, k = 1 .. 2N-1
//   sigma2[k-1] = variance of hop k; odd k are the T1-side links h_i
//                 (sigma2 index 2i-1), even k the T2-side links g_i.
struct PowerProfile {
  double P1 = 1.0;
  double P2 = 1.0;
  std::vector<double> Pr;
  std::vector<double> sigma2;
  double sigma_n2 = 1.0;

  int hop_pairs() const { return static_cast<int>(sigma2.size() / 2); }
  double relay_power(int k) const { return Pr.at(static_cast<std::size_t>(k - 1)); }
  double hop_var(int k) const { return sigma2.at(static_cast<std::size_t>(k - 1)); }

  // Throws std::invalid_argument when lengths or signs are inconsistent.
  void validate() const;

  // Every node transmits with power P; every hop has the same variance.
  static PowerProfile equal_power(double P, int N, double sigma2 = 1.0, double sigma_n2 = 1.0);
};

struct ChannelRealization {
  std::vector<cplx> h;  // h_1 .. h_N, T1 side
  std::vector<cplx> g;  // g_1 .. g_N, T2 side
};

ChannelRealization draw_channels(const PowerProfile& profile, int N, RngStream& rng);
ChannelRealization conjugate(const ChannelRealization& ch);

// Amplification factors of the 4-hop protocol and the derived scalars.
struct Gains {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  std::array<double, 2> alpha_tilde{};  // first-round gains of R1 and R2
  double alpha3_tilde = 0.0;            // pilot re-encoding gain of R3
  double xi = 0.0;                      // 1 + alpha1^2 sigma1^2
  double eps = 0.0;                     // 2 alpha1^2 sigma3^2 + alpha2^2 sigma4^2 + 1
  double a0 = 0.0;                      // alpha1^2 alpha3_tilde^2 eps / xi
  std::array<double, 4> hop_var{};      // sigma1^2 .. sigma4^2
};

// L is the pilot length; it enters the pilot re-encoding gain.
Gains compute_gains(const PowerProfile& profile, std::size_t L);

struct ThetaStatistics {
  double sigma_theta1_2 = 0.0;  // E|h1^2 h2^2|^2 = 4 sigma1^4 sigma3^4
  double sigma_theta2_2 = 0.0;  // E|h1 h2 g1 g2|^2
};

ThetaStatistics theta_statistics(const Gains& gains);

// (h1^2 h2^2, h1 h2 g1 g2)
std::pair<cplx, cplx> composite_theta(const ChannelRealization& ch);

// Coefficient of P_T in the z3 noise covariance, relative to sigma_n^2 xi:
// alpha1^2 alpha3_tilde^2 sigma1^2 sigma3^2 eps / xi.
double noise_projection_weight(const Gains& gains);

// sigma_n^2 (xi I + alpha1^2 alpha3_tilde^2 sigma1^2 sigma3^2 eps P_T)
CMat noise_cov_z3_lmmse(const TrainingSet& ts, const Gains& gains, double sigma_n2);

// Structured inverse (1/(sigma_n^2 xi)) (I - a/(1+a) P_T) of the matrix above.
CMat noise_cov_z3_inverse(const TrainingSet& ts, const Gains& gains, double sigma_n2);

}  // namespace relaync

#endif  // RELAYNC_CHANNEL_HPP
