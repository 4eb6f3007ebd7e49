// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaync/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "relaync/estimators.hpp"

namespace relaync {

namespace {

void require_noise(double sigma_n2, const char* who) {
  if (!(sigma_n2 > 0.0) || !std::isfinite(sigma_n2))
    throw std::domain_error(std::string(who) + ": sigma_n^2 must be positive and finite");
}

// (c1, c2) = (alpha1^2 alpha3_tilde, alpha1 alpha2 alpha3_tilde)
std::pair<double, double> signal_scales(const Gains& g) {
  return {g.alpha1 * g.alpha1 * g.alpha3_tilde, g.alpha1 * g.alpha2 * g.alpha3_tilde};
}

// Diagonal of [(diag(1/p1, 1/p2) + d [[u1^2 Q1, u1 u2 g12], [.., u2^2 Q2]])^{-1}].
std::pair<double, double> info_form_diag(double inv_p1, double inv_p2, double d, double u1,
                                         double u2, const TrainingSet& ts) {
  const double m00 = inv_p1 + d * u1 * u1 * ts.Q1;
  const double m11 = inv_p2 + d * u2 * u2 * ts.Q2;
  const double off2 = std::norm(d * u1 * u2 * dot(ts.t1, ts.t2));
  const double det = m00 * m11 - off2;
  if (!(det > 0.0)) throw SingularMatrixError("information matrix is not positive definite");
  return {m11 / det, m00 / det};
}

}  // namespace

std::string_view to_string(BoundKind k) {
  switch (k) {
    case BoundKind::lmmse_mse: return "lmmse-mse";
    case BoundKind::crlb: return "crlb";
    case BoundKind::asymptotic_mse: return "asymptotic-mse";
    case BoundKind::asymptotic_crlb: return "asymptotic-crlb";
  }
  return "unknown";
}

std::string_view to_string(PriorRegime r) {
  switch (r) {
    case PriorRegime::vanishing: return "vanishing";
    case PriorRegime::unit: return "unit";
    case PriorRegime::unbounded: return "unbounded";
  }
  return "unknown";
}

BoundResult lmmse_mse_closed_form(const TrainingSet& ts, const Gains& gains,
                                  const ThetaStatistics& stats, double sigma_n2) {
  const LmmseIntermediates m = lmmse_intermediates(ts, gains, stats, sigma_n2);
  const auto [c1, c2] = signal_scales(gains);
  const double scale = m.tau * gains.xi * sigma_n2;
  const double q1q2x = m.x * ts.Q1 * ts.Q2;
  const double t1rt1 = (ts.Q1 + m.A2 * q1q2x) / scale;
  const double t2rt2 = (ts.Q2 + m.A1 * q1q2x) / scale;
  const double s1 = stats.sigma_theta1_2;
  const double s2 = stats.sigma_theta2_2;
  BoundResult r;
  r.first = s1 - c1 * c1 * s1 * s1 * t1rt1;
  r.second = s2 - c2 * c2 * s2 * s2 * t2rt2;
  r.kind = BoundKind::lmmse_mse;
  return r;
}

BoundResult lmmse_mse_matrix(const TrainingSet& ts, const Gains& gains,
                             const ThetaStatistics& stats, double sigma_n2) {
  require_noise(sigma_n2, "lmmse_mse_matrix");
  const CMat rinv = invert_hermitian(lmmse_rz3(ts, gains, stats, sigma_n2));
  const auto [c1, c2] = signal_scales(gains);
  const CMat h = CMat::from_columns({cplx(c1) * ts.t1, cplx(c2) * ts.t2});
  const CMat c = CMat::diagonal({stats.sigma_theta1_2, stats.sigma_theta2_2});
  const CMat e = c - c * h.adjoint() * rinv * h * c;
  BoundResult r;
  r.first = e(0, 0).real();
  r.second = e(1, 1).real();
  r.kind = BoundKind::lmmse_mse;
  return r;
}

double lmmse_total_mse_simplified(const TrainingSet& ts, const Gains& gains,
                                  const ThetaStatistics& stats, double sigma_n2) {
  const LmmseIntermediates m = lmmse_intermediates(ts, gains, stats, sigma_n2);
  const double k = m.b / (1.0 + m.a);
  const double a1s = gains.alpha1 * gains.alpha1;
  const double a2s = gains.alpha2 * gains.alpha2;
  const double s1 = stats.sigma_theta1_2;
  const double s2 = stats.sigma_theta2_2;
  const double lambda = 1.0 / (s1 * s2) + k * (a2s * ts.Q2 / s1 + a1s * ts.Q1 / s2) +
                        k * k * m.x * a1s * a2s * ts.Q1 * ts.Q2;
  return (1.0 / s1 + 1.0 / s2 + k * (a1s * ts.Q1 + a2s * ts.Q2)) / lambda;
}

bool CrlbCoefficients::regime_ok() const { return std::abs(D4) < D1; }

CrlbCoefficients crlb_coefficients(const TrainingSet& ts, const Gains& gains, cplx theta1,
                                   double sigma_n2) {
  require_noise(sigma_n2, "crlb_coefficients");
  const CMat pt = projection_onto_columns(ts.T());
  CrlbCoefficients d;
  d.r = static_cast<int>(std::lround(pt.trace().real()));
  d.a = gains.a0 * std::abs(theta1);
  const double c = std::pow(gains.alpha1, 4) * gains.alpha3_tilde * gains.alpha3_tilde /
                   (sigma_n2 * gains.xi * (1.0 + d.a));
  const double rank_term = gains.a0 * gains.a0 * double((d.r - 2) * (d.r - 2)) /
                           (4.0 * (1.0 + d.a) * (1.0 + d.a));
  const cplx phase2 = std::abs(theta1) > 0.0 ? theta1 * theta1 / std::norm(theta1) : cplx(1.0);
  d.D1 = c * ts.Q1 + rank_term;
  d.D2 = c * ts.rho * std::sqrt(ts.Q1 * ts.Q2);
  d.D3 = c * ts.Q2;
  d.D4 = rank_term * phase2;
  return d;
}

BoundResult crlb_from_coefficients(const CrlbCoefficients& d) {
  const double y = std::norm(d.D2);
  const double q = std::norm(d.D4);
  const double den = y * y - 2.0 * d.D1 * d.D3 * y + d.D1 * d.D1 * d.D3 * d.D3 - q * d.D3 * d.D3;
  BoundResult r;
  r.kind = BoundKind::crlb;
  r.first = d.D3 * (d.D1 * d.D3 - y) / den;
  r.second = (-d.D1 * y - q * d.D3 + d.D1 * d.D1 * d.D3) / den;
  r.valid = d.regime_ok() && den > 0.0 && d.D1 > 0.0 && d.D3 > 0.0;
  return r;
}

BoundResult crlb_4hop(const TrainingSet& ts, const Gains& gains, cplx theta1, double sigma_n2) {
  return crlb_from_coefficients(crlb_coefficients(ts, gains, theta1, sigma_n2));
}

BoundResult fim_crlb_oracle(const CrlbCoefficients& d) {
  // J = [[F, G], [G^*, F^*]] on (theta, theta^*).
  CMat j(4, 4);
  j(0, 0) = d.D1;
  j(0, 1) = d.D2;
  j(1, 0) = std::conj(d.D2);
  j(1, 1) = d.D3;
  j(2, 2) = d.D1;
  j(2, 3) = std::conj(d.D2);
  j(3, 2) = d.D2;
  j(3, 3) = d.D3;
  j(0, 2) = d.D4;
  j(2, 0) = std::conj(d.D4);
  const cplx i(0.0, 1.0);
  CMat m(4, 4);
  for (std::size_t k = 0; k < 2; ++k) {
    m(k, k) = 1.0;
    m(k, k + 2) = 1.0;
    m(k + 2, k) = -i;
    m(k + 2, k + 2) = i;
  }
  const CMat frr = m * j * m.adjoint();
  const CMat inv = invert_hermitian(frr);
  BoundResult r;
  r.kind = BoundKind::crlb;
  r.first = (inv(0, 0) + inv(2, 2)).real();
  r.second = (inv(1, 1) + inv(3, 3)).real();
  r.valid = d.regime_ok();
  return r;
}

BoundResult fim_crlb_oracle(const TrainingSet& ts, const Gains& gains,
                            std::pair<cplx, cplx> theta, double sigma_n2) {
  // theta2 does not enter the Fisher information of this model.
  return fim_crlb_oracle(crlb_coefficients(ts, gains, theta.first, sigma_n2));
}

std::pair<double, double> crlb_rho_derivative(const CrlbCoefficients& d) {
  const double y = std::norm(d.D2);
  const double q = std::norm(d.D4);
  const double u = y - d.D1 * d.D3;
  const double den = u * u - q * d.D3 * d.D3;
  const double den2 = den * den;
  const double first = d.D3 * (u * u + q * d.D3 * d.D3) / den2;
  const double e = d.D1 * d.D1 - q;
  const double second = (d.D1 * y * y - 2.0 * d.D3 * e * y + d.D1 * d.D3 * d.D3 * e) / den2;
  return {first, second};
}

std::pair<double, double> crlb_rho_derivative_sign(const TrainingSet& ts, const Gains& gains,
                                                   cplx theta1, double sigma_n2) {
  return crlb_rho_derivative(crlb_coefficients(ts, gains, theta1, sigma_n2));
}

BoundResult multihop_lmmse_mse(const TrainingSet& ts, const MultihopGains& gains,
                               const MultihopPriors& priors, const MultihopNoise& noise,
                               double sigma_n2) {
  require_noise(sigma_n2, "multihop_lmmse_mse");
  if (!(priors.var1 > 0.0) || !(priors.var2 > 0.0))
    throw std::domain_error("multihop_lmmse_mse: priors must be > 0");
  const double s = gains.alpha_turn_tilde * gains.A_h();
  const double d = 1.0 / (sigma_n2 * noise.total());
  const auto [e1, e2] =
      info_form_diag(1.0 / priors.var1, 1.0 / priors.var2, d, s * gains.A_h(), s * gains.A_g(), ts);
  return {e1, e2, BoundKind::lmmse_mse, true};
}

BoundResult multihop_crlb(const TrainingSet& ts, const MultihopGains& gains,
                          const MultihopNoise& noise, double sigma_n2) {
  require_noise(sigma_n2, "multihop_crlb");
  const double s = gains.alpha_turn_tilde * gains.A_h();
  const double l1 = s * gains.A_h();
  const double l2 = s * gains.A_g();
  const double f = sigma_n2 * noise.total() / ts.x();
  return {f / (l1 * l1 * ts.Q1), f / (l2 * l2 * ts.Q2), BoundKind::crlb, true};
}

double finite_N_noise_factor(const AsymptoticParams& params, int N, double sigma_n2) {
  if (N < 1) throw std::invalid_argument("finite_N_noise_factor: N must be >= 1");
  const double w = params.omega;
  const double n = double(N);
  constexpr double kSingular = 1e-12;
  const double first = std::abs(1.0 - w) < kSingular
                           ? 2.0 * n - 1.0  // 1 - w^N + w^{N+1} - w^{2N} ~ (2N - 1)(1 - w)
                           : (1.0 - std::pow(w, n) + std::pow(w, n + 1.0) - std::pow(w, 2.0 * n)) /
                                 (1.0 - w);
  // (1 - y^{N-1}) / (1 - y) with y = 2w is the geometric sum 1 + y + .. + y^{N-2}.
  const double y = 2.0 * w;
  const double geometric =
      std::abs(1.0 - y) < kSingular ? n - 1.0 : (1.0 - std::pow(y, n - 1.0)) / (1.0 - y);
  return (first + 2.0 * std::pow(w, n + 1.0) * geometric) * sigma_n2;
}

double asymptotic_noise_limit(const AsymptoticParams& params, double sigma_n2) {
  if (!params.convergent()) return std::numeric_limits<double>::infinity();
  return sigma_n2 / (1.0 - params.omega);
}

std::pair<BoundResult, BoundResult> asymptotic_2Nhop_bounds(const AsymptoticParams& params,
                                                            const TrainingSet& ts,
                                                            double sigma_n2) {
  require_noise(sigma_n2, "asymptotic_2Nhop_bounds");
  const bool ok = params.convergent() && params.kappa == 1.0;
  const double scale = asymptotic_noise_limit(params, sigma_n2) / ts.x();
  BoundResult mse{scale / ts.Q1, scale / ts.Q2, BoundKind::asymptotic_mse, ok};
  BoundResult crlb{scale / ts.Q1, scale / ts.Q2, BoundKind::asymptotic_crlb, ok};
  return {mse, crlb};
}

std::pair<BoundResult, BoundResult> idealized_2Nhop_bounds(const AsymptoticParams& params,
                                                           const TrainingSet& ts, double sigma_n2) {
  require_noise(sigma_n2, "idealized_2Nhop_bounds");
  if (params.N < 1) throw std::invalid_argument("idealized_2Nhop_bounds: N must be >= 1");
  const double n = double(params.N);
  const double eta = finite_N_noise_factor(params, params.N, 1.0);
  const double d = std::pow(params.kappa, 2.0 * n - 1.0) / (eta * sigma_n2);
  const double s4n = std::pow(params.sigma, 4.0 * n);
  const double p1 = std::pow(2.0, n) * s4n;
  const double p2 = s4n;
  const auto [e1, e2] = info_form_diag(1.0 / p1, 1.0 / p2, d, 1.0, 1.0, ts);
  const bool ok = params.convergent();
  BoundResult mse{e1, e2, BoundKind::lmmse_mse, ok};
  const double f = 1.0 / (d * ts.x());
  BoundResult crlb{f / ts.Q1, f / ts.Q2, BoundKind::crlb, ok};
  return {mse, crlb};
}

double prior_limited_mse(int N, double sigma2) {
  const double n = double(N);
  return (1.0 + std::pow(2.0, n)) * std::pow(sigma2, 2.0 * n);
}

PriorRegime classify_prior_regime(double sigma2) {
  // (1 + 2^N) sigma^{4N} behaves like (2 sigma^4)^N.
  const double r = 2.0 * sigma2 * sigma2;
  if (std::abs(r - 1.0) <= 1e-12) return PriorRegime::unit;
  return r < 1.0 ? PriorRegime::vanishing : PriorRegime::unbounded;
}

}  // namespace relaync
