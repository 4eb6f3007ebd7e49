// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RELAYNC_RNG_HPP
#define RELAYNC_RNG_HPP

#include <cstdint>
#include <random>

#include "relaync/numeric.hpp"

namespace relaync {

// One reproducible random stream. Monte-Carlo trial k uses stream id k, so a
// trial's draws do not depend on which worker runs it.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }

  // One CN(0, variance) draw; variance is the total over real and imaginary.
  cplx cgauss(double variance);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

CVec sample_cgauss(std::size_t n, double variance, RngStream& rng);

}  // namespace relaync

#endif  // RELAYNC_RNG_HPP
