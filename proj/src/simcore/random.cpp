// SPDX-License-Identifier: Apache-2.0

#include "urllc/simcore/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace urllc::simcore {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

SeededStream::SeededStream(std::uint64_t master_seed, std::uint64_t substream_id)
    : seed_(master_seed),
      substream_(substream_id),
      key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)} {}

std::uint32_t SeededStream::next32() {
  if (used_ == 4) {
    buffer_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                          static_cast<std::uint32_t>(substream_), static_cast<std::uint32_t>(substream_ >> 32)},
                         key_);
    ++block_;
    used_ = 0;
  }
  return buffer_[used_++];
}

SeededStream::result_type SeededStream::operator()() {
  const std::uint64_t lo = next32();
  const std::uint64_t hi = next32();
  return (hi << 32) | lo;
}

double SeededStream::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t SeededStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("SeededStream::below: n must be positive");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = max() - max() % n;
  for (;;) {
    const std::uint64_t r = (*this)();
    if (r < limit) return r % n;
  }
}

bool SeededStream::bit() {
  if (bits_left_ == 0) {
    bit_buffer_ = (*this)();
    bits_left_ = 64;
  }
  const bool b = bit_buffer_ & 1u;
  bit_buffer_ >>= 1;
  --bits_left_;
  return b;
}

double SeededStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double phase = 2.0 * std::numbers::pi * uniform();
  cached_normal_ = r * std::sin(phase);
  has_cached_normal_ = true;
  return r * std::cos(phase);
}

double SeededStream::exponential(double mean) { return -mean * std::log(uniform()); }

std::complex<double> SeededStream::complex_normal(double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

double SeededStream::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("SeededStream::gamma: bad parameters");
  if (shape < 1.0) {
    const double boost = std::pow(uniform(), 1.0 / shape);
    return gamma(shape + 1.0, scale) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

}  // namespace urllc::simcore
