// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RELAYNC_MULTIHOP_HPP
#define RELAYNC_MULTIHOP_HPP

#include <cstddef>
#include <vector>

#include "relaync/channel.hpp"
#include "relaync/estimators.hpp"
#include "relaync/numeric.hpp"
#include "relaync/rng.hpp"
#include "relaync/simulator.hpp"
#include "relaync/training.hpp"

namespace relaync {

// The 2N-hop chain is laid out on positions 0 .. 2N: T1 at 0, the T1-side
// relays R1, R3, .., R_{2N-3} at 1 .. N-1, the turnaround relay R_{2N-1} at
// N, the T2-side relays R_{2N-2}, .., R2 at N+1 .. 2N-1 and T2 at 2N.
// Link p joins positions p and p+1: h_{p+1} for p < N, g_{2N-p} otherwise.
struct ChainLayout {
  int N = 2;
  int positions() const { return 2 * N + 1; }
  int links() const { return 2 * N; }
  // Relay number k of R_k at a relay position (1 .. 2N-1).
  int relay_number(int p) const;
  // Hop index (1-based, into PowerProfile::sigma2) of link p.
  int hop_index(int p) const;
  double node_power(const PowerProfile& profile, int p) const;
  double link_var(const PowerProfile& profile, int p) const;
  cplx link(const ChannelRealization& ch, int p) const;
};

struct MultihopGains {
  int N = 2;
  // alpha[p] for positions 0 .. 2N; the end nodes hold 0.
  std::vector<double> alpha;
  double alpha_turn_tilde = 0.0;  // pilot re-encoding gain at the turnaround
  bool unit = false;
  double A_h() const;  // product of alpha over positions 1 .. N-1
  double A_g() const;  // product over N+1 .. 2N-1
  double all() const;  // product over every relay position
};

// Neighbour-consistent gains alpha_p = sqrt(P_p / (sum_nb P_nb sigma^2_link + sigma_n^2))
// and the re-encoding gain generalized from the 4-hop form.
MultihopGains compute_multihop_gains(const PowerProfile& profile, std::size_t L);
// Every alpha (and the re-encoding gain) equal to one.
MultihopGains unit_multihop_gains(int N);

// Noise at T1 after the full pilot round, relative to sigma_n^2 and averaged
// over the channels: R = sigma_n^2 (Fb I + Ff P_T).
struct MultihopNoise {
  double Fb = 0.0;  // backward-wave white part
  double Ff = 0.0;  // forward and turnaround noise re-broadcast inside span(T)
  double total() const { return Fb + Ff; }
};
MultihopNoise multihop_noise_factors(const PowerProfile& profile, const MultihopGains& gains);

// E|varpi1|^2 = prod 2 sigma^4 over the T1-side hops, E|varpi2|^2 = prod of all variances.
struct MultihopPriors {
  double var1 = 0.0;
  double var2 = 0.0;
};
MultihopPriors multihop_priors(const PowerProfile& profile, int N);

// (prod h_i^2, prod h_i g_i)
std::pair<cplx, cplx> composite_varpi(const ChannelRealization& ch);

struct MultihopTrainingObservation {
  CVec z1N;
  cplx varpi1 = 0.0;
  cplx varpi2 = 0.0;
  // LS estimate at the turnaround of [prod h, prod g, echo].
  cplx turn_hat[3] = {0.0, 0.0, 0.0};
  // Echo coefficient estimates per position 0 .. 2N-1 (T1 and every relay).
  std::vector<cplx> echo_hat;
};

// Pilot round: forward waves from both ends, LS at the turnaround, re-encoded
// backward wave to T1, then one echo slot per node for the self-interference
// coefficients. sigma_n2 = 0 runs noiselessly.
MultihopTrainingObservation run_training_2Nhop(const ChannelRealization& ch,
                                               const PowerProfile& profile,
                                               const MultihopGains& gains, const TrainingSet& ts,
                                               double sigma_n2, RngStream& rng);

// Echo coefficient sum_nb alpha_nb c_link^2 of position p (0 .. 2N-1).
cplx true_echo(const ChannelRealization& ch, const MultihopGains& gains, int p);

// varpi estimates from z1N.
ThetaEstimate ls_estimate_2N(const CVec& z1N, const TrainingSet& ts, const MultihopGains& gains);

class MultihopLmmse {
 public:
  MultihopLmmse(const TrainingSet& ts, const MultihopGains& gains, const MultihopPriors& priors,
                const MultihopNoise& noise, double sigma_n2);
  ThetaEstimate estimate(const CVec& z1N) const;
  // Exact error covariance diagonal under the averaged model.
  double mse1() const { return mse_[0]; }
  double mse2() const { return mse_[1]; }

 private:
  CVec w1_;
  CVec w2_;
  double mse_[2] = {0.0, 0.0};
};

struct MultihopCsi {
  std::vector<cplx> echo;  // per position 0 .. 2N-1
  cplx varpi1 = 0.0;
  cplx varpi2 = 0.0;
  bool estimated = false;
};
MultihopCsi perfect_multihop_csi(const ChannelRealization& ch, const MultihopGains& gains);
MultihopCsi estimated_multihop_csi(const MultihopTrainingObservation& obs,
                                   const ThetaEstimate& varpi);

struct MultihopExchangeRecord {
  std::vector<cplx> x1;
  std::vector<cplx> x2;
  std::vector<cplx> x2_desired;  // noiseless contribution of x2(k) at T1
  std::vector<cplx> x2_post;     // T1 reception after removing its own x1(k)
  std::vector<cplx> x2_hat;      // soft estimate of x2(k), k = 0 .. rounds-1
  int phases = 0;
};

// One exchange per 2N phases. Both end-node symbols travel to the turnaround
// (N phases), which forwards their superposition back (N phases); T1 receives
//   alpha_N A_h (A_h varpi1 sqrt(P1) x1 + A_g varpi2 sqrt(P2) x2) + noise,
// removes the varpi1 term and scales by the varpi2 coefficient. A relay only
// listens while its neighbours are silent, so no relay-side echo remains.
MultihopExchangeRecord run_data_exchange_2Nhop(const ChannelRealization& ch,
                                               const MultihopGains& gains,
                                               const DataExchangeOptions& opt,
                                               const MultihopCsi& csi, RngStream& rng);

}  // namespace relaync

#endif  // RELAYNC_MULTIHOP_HPP
