// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RELAYNC_BOUNDS_HPP
#define RELAYNC_BOUNDS_HPP

#include <string_view>
#include <utility>

#include "relaync/channel.hpp"
#include "relaync/multihop.hpp"
#include "relaync/numeric.hpp"
#include "relaync/training.hpp"

namespace relaync {

enum class BoundKind { lmmse_mse, crlb, asymptotic_mse, asymptotic_crlb };

std::string_view to_string(BoundKind k);

// One value per composite parameter (theta1/varpi1 first).
struct BoundResult {
  double first = 0.0;
  double second = 0.0;
  BoundKind kind = BoundKind::lmmse_mse;
  // False when the inputs fall outside the regime the formula assumes. The
  // values are still returned so the caller can inspect them.
  bool valid = true;
  double total() const { return first + second; }
};

// ---- LMMSE, 4 hops ------------------------------------------------------

// e_i = sigma_theta_i^2 - c_i^2 sigma_theta_i^4 t_i^H R^{-1} t_i with the rational
// forms t1^H R^{-1} t1 = (Q1 + A2 x Q1 Q2) / (tau xi sigma_n^2) and its mirror.
BoundResult lmmse_mse_closed_form(const TrainingSet& ts, const Gains& gains,
                                  const ThetaStatistics& stats, double sigma_n2);

// Diagonal of C - C H^H R_z3^{-1} H C with a dense R_z3 inverse, H = [c1 t1, c2 t2].
BoundResult lmmse_mse_matrix(const TrainingSet& ts, const Gains& gains,
                             const ThetaStatistics& stats, double sigma_n2);

// Total MSE through the information form: with k = b / (1 + a),
//   lambda = 1/(s1 s2) + k (alpha2^2 Q2 / s1 + alpha1^2 Q1 / s2) + k^2 x alpha1^2 alpha2^2 Q1 Q2
//   sigma_theta^2 = (1/s1 + 1/s2 + k (alpha1^2 Q1 + alpha2^2 Q2)) / lambda.
double lmmse_total_mse_simplified(const TrainingSet& ts, const Gains& gains,
                                  const ThetaStatistics& stats, double sigma_n2);

// ---- CRLB, 4 hops -------------------------------------------------------

struct CrlbCoefficients {
  double D1 = 0.0;
  cplx D2 = 0.0;
  double D3 = 0.0;
  cplx D4 = 0.0;
  double a = 0.0;  // a0 |theta1|
  int r = 2;       // rank of P_T
  // |D4| < D1, the regime in which both bounds grow with |rho|^2.
  bool regime_ok() const;
};

// Coefficients at the true theta1 (a = a0 |theta1|).
CrlbCoefficients crlb_coefficients(const TrainingSet& ts, const Gains& gains, cplx theta1,
                                   double sigma_n2);

// The two rational forms in D1..D4. valid is cleared outside the regime or
// when the common denominator is not positive.
BoundResult crlb_from_coefficients(const CrlbCoefficients& d);
BoundResult crlb_4hop(const TrainingSet& ts, const Gains& gains, cplx theta1, double sigma_n2);

// Real-parameter FIM M [[F, G], [G^*, F^*]] M^H with F = [[D1, D2], [D2^*, D3]],
// G = [[D4, 0], [0, 0]] and M = [[I, I], [-jI, jI]]. The bound on theta_i is the
// sum of the real and imaginary diagonal entries of its inverse. Throws
// SingularMatrixError when the FIM is not positive definite.
BoundResult fim_crlb_oracle(const CrlbCoefficients& d);
BoundResult fim_crlb_oracle(const TrainingSet& ts, const Gains& gains,
                            std::pair<cplx, cplx> theta, double sigma_n2);

// d CRLB_i / d |D2|^2 with Y = |D2|^2, q = |D4|^2, den = (Y - D1 D3)^2 - q D3^2:
//   first:  D3 ((Y - D1 D3)^2 + q D3^2) / den^2
//   second: (D1 Y^2 - 2 D3 (D1^2 - q) Y + D1 D3^2 (D1^2 - q)) / den^2
std::pair<double, double> crlb_rho_derivative(const CrlbCoefficients& d);
std::pair<double, double> crlb_rho_derivative_sign(const TrainingSet& ts, const Gains& gains,
                                                   cplx theta1, double sigma_n2);

// ---- 2N hops ------------------------------------------------------------

// Exact LMMSE error variances of (varpi1, varpi2) under the channel-averaged
// z1N noise sigma_n^2 (Fb I + Ff P_T).
BoundResult multihop_lmmse_mse(const TrainingSet& ts, const MultihopGains& gains,
                               const MultihopPriors& priors, const MultihopNoise& noise,
                               double sigma_n2);

// Gaussian-noise CRLB sigma_n^2 (Fb + Ff) [(T^H T)^{-1}]_ii / lambda_i^2 with
// lambda = alpha_turn_tilde A_h (A_h, A_g).
BoundResult multihop_crlb(const TrainingSet& ts, const MultihopGains& gains,
                          const MultihopNoise& noise, double sigma_n2);

struct AsymptoticParams {
  double omega = 0.5;  // alpha_i^2 sigma_i^2
  double kappa = 1.0;  // alpha_i^2
  double sigma = 1.0;  // common channel standard deviation
  int N = 2;
  // 0 < omega < 1.
  bool convergent() const { return omega > 0.0 && omega < 1.0; }
};

// sigma_n^2 [(1 - w^N + w^{N+1} - w^{2N}) / (1 - w) + 2 w^{N+1} (1 - (2w)^{N-1}) / (1 - 2w)].
// At w = 1/2 the second fraction is replaced by its limit 2 w^{N+1} (N - 1); at
// w = 1 the first one by its limit 2N - 1. Throws std::invalid_argument for N < 1.
double finite_N_noise_factor(const AsymptoticParams& params, int N, double sigma_n2 = 1.0);

// N -> infinity limit sigma_n^2 / (1 - w).
double asymptotic_noise_limit(const AsymptoticParams& params, double sigma_n2 = 1.0);

// Large-N LMMSE and CRLB pairs, both sigma_n^2 / ((1 - w) x Q_i). The pair is
// flagged invalid outside 0 < w < 1 or when kappa != 1.
std::pair<BoundResult, BoundResult> asymptotic_2Nhop_bounds(const AsymptoticParams& params,
                                                            const TrainingSet& ts,
                                                            double sigma_n2);

// Idealized N-pair model with common variance sigma^2 and gain kappa:
//   MSE = [(diag{2^N sigma^{4N}, sigma^{4N}}^{-1} + kappa^{2N-1} / (eta sigma_n^2) T^H T)^{-1}]_ii
//   CRLB = eta sigma_n^2 / kappa^{2N-1} [(T^H T)^{-1}]_ii
// where eta is the finite-N noise factor (relative to sigma_n^2) at params.N.
std::pair<BoundResult, BoundResult> idealized_2Nhop_bounds(const AsymptoticParams& params,
                                                           const TrainingSet& ts, double sigma_n2);

// Prior-limited total MSE (1 + 2^N) sigma^{4N} of the kappa < 1 case and how it
// behaves as N grows.
enum class PriorRegime { vanishing, unit, unbounded };
std::string_view to_string(PriorRegime r);
double prior_limited_mse(int N, double sigma2);
PriorRegime classify_prior_regime(double sigma2);

}  // namespace relaync

#endif  // RELAYNC_BOUNDS_HPP
