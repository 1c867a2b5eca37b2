// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random streams.
//
// Every stream is identified by (master_seed, substream_id). The generator is
// Philox4x32-10: the master seed is the key and the substream id occupies the
// upper half of the 128-bit counter, so any two distinct ids walk disjoint
// counter ranges of the same keyed bijection. Creating a stream is free, which
// lets Monte-Carlo code give every trial its own substream and stay
// reproducible no matter how trials are spread over workers.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>

namespace urllc::simcore {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32-10 block.
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

class SeededStream {
 public:
  using result_type = std::uint64_t;

  SeededStream(std::uint64_t master_seed, std::uint64_t substream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t substream_id() const { return substream_; }

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Fair coin.
  bool bit();
  double normal();
  double exponential(double mean);
  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance);
  /// Gamma(shape, scale) by Marsaglia-Tsang.
  double gamma(double shape, double scale);

 private:
  std::uint32_t next32();

  std::uint64_t seed_;
  std::uint64_t substream_;
  PhiloxKey key_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
  std::uint64_t bit_buffer_ = 0;
  int bits_left_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace urllc::simcore
