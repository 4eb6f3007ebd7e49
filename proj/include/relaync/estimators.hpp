// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RELAYNC_ESTIMATORS_HPP
#define RELAYNC_ESTIMATORS_HPP

#include <cstddef>
#include <string_view>

#include "relaync/channel.hpp"
#include "relaync/numeric.hpp"
#include "relaync/training.hpp"

namespace relaync {

enum class Method { lmmse, ml, ml_grid_oracle, p2p_baseline, ls };

std::string_view to_string(Method m);

struct ThetaEstimate {
  cplx theta1_hat = 0.0;
  cplx theta2_hat = 0.0;
  Method method = Method::lmmse;
};

// Scalars behind the explicit z3 covariance
//   R_z3 = sigma_n^2 xi (I + A1 t1 t1^H + A2 t2 t2^H + A3 t1 t2^H + A3^* t2 t1^H).
// A1 and A2 carry alpha1^2 and alpha2^2 on the signal terms; see README notes.
struct LmmseIntermediates {
  double A1 = 0.0;
  double A2 = 0.0;
  cplx A3 = 0.0;
  double tau = 0.0;       // det(I + C G) with C = [[A1, A3], [A3^*, A2]], G = T^H T
  double tau_star = 0.0;  // tau with only the noise parts of A1..A3
  double nu = 0.0;        // b / tau_star
  double x = 0.0;         // 1 - |rho|^2
  double a = 0.0;         // alpha1^2 alpha3_tilde^2 sigma1^2 sigma3^2 eps / xi
  double b = 0.0;         // alpha1^2 alpha3_tilde^2 / (sigma_n^2 xi)
};

LmmseIntermediates lmmse_intermediates(const TrainingSet& ts, const Gains& gains,
                                       const ThetaStatistics& stats, double sigma_n2);

// R_z3 from the A-coefficients.
CMat lmmse_rz3(const TrainingSet& ts, const Gains& gains, const ThetaStatistics& stats,
               double sigma_n2);

// Precomputes R_z3^{-1} t_i once per configuration.
class LmmseEstimator {
 public:
  LmmseEstimator(const TrainingSet& ts, const Gains& gains, const ThetaStatistics& stats,
                 double sigma_n2);
  ThetaEstimate estimate(const CVec& z3) const;

 private:
  CVec w1_;
  CVec w2_;
};

ThetaEstimate lmmse_estimate(const CVec& z3, const TrainingSet& ts, const Gains& gains,
                             const ThetaStatistics& stats, double sigma_n2);

// Unweighted least squares: [theta1, theta2] = diag(c1, c2)^{-1} T^+ z3 with
// c1 = alpha1^2 alpha3_tilde and c2 = alpha1 alpha2 alpha3_tilde. Exact on
// noiseless observations.
ThetaEstimate ls_estimate(const CVec& z3, const TrainingSet& ts, const Gains& gains);

// ---- Maximum likelihood -------------------------------------------------

struct MlIntermediates {
  CMat B;             // A^H R^{-1} A evaluated at a_hat
  int r = 0;          // tr(P_T)
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double a_hat = 0.0;
  double phase1 = 0.0;
};

// Nonnegative minimizer of f on a >= 0 given the derivative numerator
// C1 a^2 + C2 a + C3 (C2 > 0). C1 == 0 is the fully correlated case.
double select_amplitude_root(double C1, double C2, double C3);

class MlEstimator {
 public:
  MlEstimator(const TrainingSet& ts, const Gains& gains, double sigma_n2);

  ThetaEstimate estimate(const CVec& z3) const;
  ThetaEstimate estimate(const CVec& z3, MlIntermediates* info) const;

  // f(a) = f1(a) + r log(1 + a); a >= 0.
  double objective(double a, const CVec& z3) const;
  // (C1 a^2 + C2 a + C3) / (sigma_n^2 xi a0^2 (1 + a)^2)
  double objective_derivative(double a, const CVec& z3) const;
  void coefficients(const CVec& z3, double* C1, double* C2, double* C3) const;

  // Dense B = A^H R^{-1} A at a given a.
  CMat b_matrix(double a) const;
  // Plain least-squares theta1 from z3 (no noise-structure weighting).
  cplx ls_theta1(const CVec& z3) const;

  // Conditional least-squares theta2 for a given theta1.
  cplx theta2_given(const CVec& z3, cplx theta1) const;

  double a0() const { return a0_; }
  int rank() const { return r_; }

  // Sufficient statistics of z3 for the objective; lets a caller evaluate
  // f at many points without touching z3 again.
  struct Stats {
    double orth;   // ||(I - P_T) z||^2
    double q;      // z^H P_T z - |z^H t2|^2 / Q2
    double p;      // z^H P_T z
    double s;      // |z^H t2|^2 / Q2
    cplx w;        // z^H t1 - rho^* sqrt(Q1/Q2) z^H t2
  };
  Stats stats(const CVec& z3) const;
  double objective(double a, const Stats& st) const;

 private:
  TrainingSet ts_;
  CMat pinv_;  // (T^H T)^{-1} T^H
  CMat pt_;
  double K_ = 0.0;
  double c1_ = 0.0;
  double c2_ = 0.0;
  double a0_ = 0.0;
  double x_ = 0.0;
  double sigma_n2_xi_ = 0.0;
  int r_ = 0;
};

ThetaEstimate ml_estimate(const CVec& z3, const TrainingSet& ts, const Gains& gains,
                          double sigma_n2);
double ml_objective(double a, const CVec& z3, const TrainingSet& ts, const Gains& gains,
                    double sigma_n2);

struct GridOracleResult {
  double a_best = 0.0;
  double f_best = 0.0;
  double a_max = 0.0;
  bool touched_upper_edge = false;
  ThetaEstimate estimate;
};

// Dense uniform grid over [0, a0 * max(10, 4 |theta1_LS|)].
GridOracleResult ml_grid_oracle(const MlEstimator& ml, const CVec& z3,
                                std::size_t points = 100000);

}  // namespace relaync

#endif  // RELAYNC_ESTIMATORS_HPP
