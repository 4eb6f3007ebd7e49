// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RELAYNC_TRAINING_HPP
#define RELAYNC_TRAINING_HPP

#include <cstddef>

#include "relaync/numeric.hpp"

namespace relaync {

// Pilots t1, t2 (end nodes) and tr (relay). tr is orthogonal to both end-node
// pilots; rho = t1^H t2 / sqrt(Q1 Q2).
struct TrainingSet {
  CVec t1;
  CVec t2;
  CVec tr;
  double Q1 = 0.0;
  double Q2 = 0.0;
  double Qr = 0.0;
  cplx rho = 0.0;

  std::size_t length() const { return t1.size(); }
  // [t1, t2]
  CMat T() const { return CMat::from_columns({t1, t2}); }
  // [t1, t2, tr]
  CMat Tr() const { return CMat::from_columns({t1, t2, tr}); }
  // 1 - |rho|^2
  double x() const { return 1.0 - std::norm(rho); }
};

// Builds pilots from the first three columns of the L-point DFT basis:
// t1 = sqrt(Q1) u1, t2 = sqrt(Q2) (rho u1 + sqrt(1-|rho|^2) u2), tr = sqrt(Qr) u3.
// |rho| == 1 is rejected unless allow_full_correlation is set.
TrainingSet build_training(std::size_t L, cplx rho, double Q1, double Q2, double Qr,
                           bool allow_full_correlation = false);

cplx measured_rho(const TrainingSet& ts);

}  // namespace relaync

#endif  // RELAYNC_TRAINING_HPP
