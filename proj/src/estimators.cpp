// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaync/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace relaync {
namespace {

void require_noise(double sigma_n2, const char* who) {
  if (!(sigma_n2 > 0.0)) throw std::domain_error(std::string(who) + ": sigma_n^2 must be > 0");
}

void require_partial_correlation(const TrainingSet& ts, const char* who) {
  if (!(ts.x() > 0.0)) throw std::domain_error(std::string(who) + ": needs |rho| < 1");
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::lmmse: return "lmmse";
    case Method::ml: return "ml";
    case Method::ml_grid_oracle: return "ml-grid-oracle";
    case Method::p2p_baseline: return "p2p-baseline";
    case Method::ls: return "ls";
  }
  return "unknown";
}

LmmseIntermediates lmmse_intermediates(const TrainingSet& ts, const Gains& gains,
                                       const ThetaStatistics& stats, double sigma_n2) {
  require_noise(sigma_n2, "lmmse_intermediates");
  require_partial_correlation(ts, "lmmse_intermediates");
  const double a1 = gains.alpha1;
  const double a2 = gains.alpha2;
  const double at2 = gains.alpha3_tilde * gains.alpha3_tilde;
  const double k = a1 * a1 * at2 / gains.xi;
  const double s13 = gains.hop_var[0] * gains.hop_var[2];
  const double x = ts.x();
  const double q1 = ts.Q1;
  const double q2 = ts.Q2;
  const double sq = std::sqrt(q1 * q2);

  LmmseIntermediates m;
  m.x = x;
  m.a = k * s13 * gains.eps;
  m.b = a1 * a1 * at2 / (sigma_n2 * gains.xi);

  const double n1 = m.a / (x * q1);
  const double n2 = m.a / (x * q2);
  const cplx n3 = -m.a * ts.rho / (x * sq);
  m.A1 = k * a1 * a1 * stats.sigma_theta1_2 / sigma_n2 + n1;
  m.A2 = k * a2 * a2 * stats.sigma_theta2_2 / sigma_n2 + n2;
  m.A3 = n3;

  auto det_term = [&](double c1, double c2, cplx c3) {
    return 1.0 + c1 * q1 + c2 * q2 + 2.0 * std::real(c3 * std::conj(ts.rho)) * sq +
           (c1 * c2 - std::norm(c3)) * x * q1 * q2;
  };
  m.tau = det_term(m.A1, m.A2, m.A3);
  m.tau_star = det_term(n1, n2, n3);
  m.nu = m.b / m.tau_star;
  return m;
}

CMat lmmse_rz3(const TrainingSet& ts, const Gains& gains, const ThetaStatistics& stats,
               double sigma_n2) {
  const LmmseIntermediates m = lmmse_intermediates(ts, gains, stats, sigma_n2);
  CMat r = CMat::identity(ts.length());
  r += cplx(m.A1) * CMat::outer(ts.t1, ts.t1);
  r += cplx(m.A2) * CMat::outer(ts.t2, ts.t2);
  r += m.A3 * CMat::outer(ts.t1, ts.t2);
  r += std::conj(m.A3) * CMat::outer(ts.t2, ts.t1);
  r *= sigma_n2 * gains.xi;
  return r;
}

LmmseEstimator::LmmseEstimator(const TrainingSet& ts, const Gains& gains,
                               const ThetaStatistics& stats, double sigma_n2) {
  // Push-through identity: R^{-1} T = T (I + C G)^{-1} / (sigma_n^2 xi), with
  // G = T^H T. Only a 2x2 inverse is needed and it stays well conditioned
  // when sigma_n^2 is tiny and R itself is not.
  const LmmseIntermediates m = lmmse_intermediates(ts, gains, stats, sigma_n2);
  const cplx g12 = dot(ts.t1, ts.t2);
  const cplx c[2][2] = {{m.A1, m.A3}, {std::conj(m.A3), m.A2}};
  const cplx g[2][2] = {{ts.Q1, g12}, {std::conj(g12), ts.Q2}};
  cplx e[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      e[i][j] = i == j ? 1.0 : 0.0;
      for (int k = 0; k < 2; ++k) e[i][j] += c[i][k] * g[k][j];
    }
  const cplx det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
  if (std::abs(det) == 0.0) throw SingularMatrixError("LmmseEstimator: singular I + C G");
  const cplx scale = 1.0 / (det * sigma_n2 * gains.xi);
  // Columns of (I + C G)^{-1}.
  const CVec r1 = scale * (e[1][1] * ts.t1 - e[1][0] * ts.t2);
  const CVec r2 = scale * (-e[0][1] * ts.t1 + e[0][0] * ts.t2);
  const double a1 = gains.alpha1;
  const double at = gains.alpha3_tilde;
  w1_ = cplx(a1 * a1 * at * stats.sigma_theta1_2) * r1;
  w2_ = cplx(a1 * gains.alpha2 * at * stats.sigma_theta2_2) * r2;
}

ThetaEstimate LmmseEstimator::estimate(const CVec& z3) const {
  return {dot(w1_, z3), dot(w2_, z3), Method::lmmse};
}

ThetaEstimate lmmse_estimate(const CVec& z3, const TrainingSet& ts, const Gains& gains,
                             const ThetaStatistics& stats, double sigma_n2) {
  return LmmseEstimator(ts, gains, stats, sigma_n2).estimate(z3);
}

ThetaEstimate ls_estimate(const CVec& z3, const TrainingSet& ts, const Gains& gains) {
  const CVec v = pseudo_inverse(ts.T()) * z3;
  const double at = gains.alpha3_tilde;
  return {v[0] / (gains.alpha1 * gains.alpha1 * at), v[1] / (gains.alpha1 * gains.alpha2 * at),
          Method::ls};
}

double select_amplitude_root(double C1, double C2, double C3) {
  if (C1 == 0.0) {
    if (!(C2 > 0.0)) return 0.0;
    return std::max(-C3 / C2, 0.0);
  }
  const double disc = C2 * C2 - 4.0 * C1 * C3;
  if (disc < 0.0) return 0.0;
  const double sq = std::sqrt(disc);
  // Same root as (-C2 + sq) / (2 C1) without the cancellation.
  const double root = C2 > 0.0 ? -2.0 * C3 / (C2 + sq) : (-C2 + sq) / (2.0 * C1);
  return std::max(root, 0.0);
}

MlEstimator::MlEstimator(const TrainingSet& ts, const Gains& gains, double sigma_n2)
    : ts_(ts) {
  require_noise(sigma_n2, "MlEstimator");
  const CMat t = ts.T();
  pinv_ = pseudo_inverse(t);
  pt_ = t * pinv_;
  sigma_n2_xi_ = sigma_n2 * gains.xi;
  K_ = 1.0 / sigma_n2_xi_;
  c1_ = gains.alpha1 * gains.alpha1 * gains.alpha3_tilde;
  c2_ = gains.alpha1 * gains.alpha2 * gains.alpha3_tilde;
  a0_ = gains.a0;
  x_ = ts.x();
  r_ = static_cast<int>(std::lround(pt_.trace().real()));
}

MlEstimator::Stats MlEstimator::stats(const CVec& z3) const {
  const CVec coef = pinv_ * z3;
  const CVec proj = coef[0] * ts_.t1 + coef[1] * ts_.t2;
  const cplx v1 = dot(ts_.t1, z3);
  const cplx v2 = dot(ts_.t2, z3);
  Stats st;
  st.orth = norm2(z3 - proj);
  st.p = norm2(proj);
  st.s = std::norm(v2) / ts_.Q2;
  st.q = norm2(proj - (v2 / ts_.Q2) * ts_.t2);
  st.w = std::conj(v1) - std::conj(ts_.rho) * std::sqrt(ts_.Q1 / ts_.Q2) * std::conj(v2);
  return st;
}

double MlEstimator::objective(double a, const Stats& st) const {
  if (a < 0.0) throw std::domain_error("ml objective: a must be >= 0");
  const double u = std::abs(st.w);
  const double m = a / a0_;
  const double f1 = K_ * st.orth +
                    K_ * (st.q - 2.0 * c1_ * m * u + c1_ * c1_ * m * m * x_ * ts_.Q1) / (1.0 + a);
  return f1 + double(r_) * std::log1p(a);
}

double MlEstimator::objective(double a, const CVec& z3) const {
  return objective(a, stats(z3));
}

void MlEstimator::coefficients(const CVec& z3, double* C1, double* C2, double* C3) const {
  const Stats st = stats(z3);
  const double tail = double(r_) * a0_ * a0_ * sigma_n2_xi_;
  *C1 = c1_ * c1_ * x_ * ts_.Q1;
  *C2 = 2.0 * c1_ * c1_ * x_ * ts_.Q1 + tail;
  *C3 = -a0_ * a0_ * st.q - 2.0 * c1_ * a0_ * std::abs(st.w) + tail;
}

double MlEstimator::objective_derivative(double a, const CVec& z3) const {
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  coefficients(z3, &C1, &C2, &C3);
  return (C1 * a * a + C2 * a + C3) / (sigma_n2_xi_ * a0_ * a0_ * (1.0 + a) * (1.0 + a));
}

CMat MlEstimator::b_matrix(double a) const {
  const std::size_t L = ts_.length();
  CMat rinv = CMat::identity(L) - cplx(a / (1.0 + a)) * pt_;
  rinv *= K_;
  const CVec rt2 = rinv * ts_.t2;
  const double denom = dot(ts_.t2, rt2).real();
  return rinv - cplx(1.0 / denom) * CMat::outer(rt2, rt2);
}

cplx MlEstimator::theta2_given(const CVec& z3, cplx theta1) const {
  return (dot(ts_.t2, z3) - c1_ * theta1 * dot(ts_.t2, ts_.t1)) / (c2_ * ts_.Q2);
}

cplx MlEstimator::ls_theta1(const CVec& z3) const { return (pinv_ * z3)[0] / c1_; }

ThetaEstimate MlEstimator::estimate(const CVec& z3) const { return estimate(z3, nullptr); }

ThetaEstimate MlEstimator::estimate(const CVec& z3, MlIntermediates* info) const {
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  coefficients(z3, &C1, &C2, &C3);
  const double a_hat = select_amplitude_root(C1, C2, C3);
  const cplx w = stats(z3).w;
  const double phase = w == cplx(0.0) ? 0.0 : -std::arg(w);

  ThetaEstimate est;
  est.method = Method::ml;
  est.theta1_hat = std::polar(a_hat / a0_, phase);
  est.theta2_hat = theta2_given(z3, est.theta1_hat);

  if (info != nullptr) {
    info->B = b_matrix(a_hat);
    info->r = r_;
    info->C1 = C1;
    info->C2 = C2;
    info->C3 = C3;
    info->a_hat = a_hat;
    info->phase1 = phase;
  }
  return est;
}

ThetaEstimate ml_estimate(const CVec& z3, const TrainingSet& ts, const Gains& gains,
                          double sigma_n2) {
  return MlEstimator(ts, gains, sigma_n2).estimate(z3);
}

double ml_objective(double a, const CVec& z3, const TrainingSet& ts, const Gains& gains,
                    double sigma_n2) {
  return MlEstimator(ts, gains, sigma_n2).objective(a, z3);
}

GridOracleResult ml_grid_oracle(const MlEstimator& ml, const CVec& z3, std::size_t points) {
  if (points < 2) throw std::invalid_argument("ml_grid_oracle: need >= 2 points");
  GridOracleResult res;
  res.a_max = ml.a0() * std::max(10.0, 4.0 * std::abs(ml.ls_theta1(z3)));
  const MlEstimator::Stats st = ml.stats(z3);
  std::size_t best = 0;
  res.f_best = ml.objective(0.0, st);
  for (std::size_t k = 1; k < points; ++k) {
    const double a = res.a_max * double(k) / double(points - 1);
    const double f = ml.objective(a, st);
    if (f < res.f_best) {
      res.f_best = f;
      best = k;
    }
  }
  res.a_best = res.a_max * double(best) / double(points - 1);
  res.touched_upper_edge = best == points - 1;
  const double phase = st.w == cplx(0.0) ? 0.0 : -std::arg(st.w);
  res.estimate.theta1_hat = std::polar(res.a_best / ml.a0(), phase);
  res.estimate.theta2_hat = ml.theta2_given(z3, res.estimate.theta1_hat);
  res.estimate.method = Method::ml_grid_oracle;
  return res;
}

}  // namespace relaync
