// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaync/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace relaync {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state ^= stream_id * 0xd1b54a32d192ed03ULL;
  const std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

cplx RngStream::cgauss(double variance) {
  if (variance < 0.0) throw std::domain_error("cgauss: negative variance");
  const double s = std::sqrt(0.5 * variance);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

CVec sample_cgauss(std::size_t n, double variance, RngStream& rng) {
  if (variance < 0.0) throw std::domain_error("sample_cgauss: negative variance");
  if (n == 0) throw std::invalid_argument("sample_cgauss: n must be >= 1");
  CVec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rng.cgauss(variance);
  return out;
}

}  // namespace relaync
