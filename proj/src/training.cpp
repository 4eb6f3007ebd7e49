// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaync/training.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relaync {
namespace {

CVec dft_column(std::size_t L, std::size_t k) {
  CVec u(L);
  const double norm = 1.0 / std::sqrt(double(L));
  for (std::size_t n = 0; n < L; ++n) {
    const double phase = 2.0 * std::numbers::pi * double(k * n % L) / double(L);
    u[n] = std::polar(norm, phase);
  }
  return u;
}

}  // namespace

TrainingSet build_training(std::size_t L, cplx rho, double Q1, double Q2, double Qr,
                           bool allow_full_correlation) {
  if (L < 3) throw std::invalid_argument("build_training: L must be >= 3");
  const double r2 = std::norm(rho);
  if (r2 > 1.0 + 1e-15) throw std::invalid_argument("build_training: |rho| > 1");
  if (r2 >= 1.0 && !allow_full_correlation) {
    throw std::invalid_argument("build_training: |rho| = 1 needs allow_full_correlation");
  }
  if (!(Q1 > 0.0) || !(Q2 > 0.0) || !(Qr > 0.0)) {
    throw std::invalid_argument("build_training: pilot powers must be positive");
  }

  const CVec u1 = dft_column(L, 0);
  const CVec u2 = dft_column(L, 1);
  const CVec u3 = dft_column(L, 2);

  TrainingSet ts;
  ts.Q1 = Q1;
  ts.Q2 = Q2;
  ts.Qr = Qr;
  ts.rho = rho;
  ts.t1 = std::sqrt(Q1) * u1;
  ts.t2 = std::sqrt(Q2) * (rho * u1 + std::sqrt(std::max(0.0, 1.0 - r2)) * u2);
  ts.tr = std::sqrt(Qr) * u3;
  return ts;
}

cplx measured_rho(const TrainingSet& ts) {
  const double q1 = norm2(ts.t1);
  const double q2 = norm2(ts.t2);
  if (!(q1 > 0.0) || !(q2 > 0.0)) throw std::invalid_argument("measured_rho: zero-power pilot");
  return dot(ts.t1, ts.t2) / std::sqrt(q1 * q2);
}

}  // namespace relaync
