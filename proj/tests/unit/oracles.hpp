// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations shared by the unit tests and the
// acceptance runner. They deliberately avoid the library's numerics.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace oracle {

inline double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

/// Normal-approximation block error for `bits` over `n` real channel uses.
inline double awgn_error(double n, double snr, double bits) {
  const double log2e = std::numbers::log2e;
  const double c = 0.5 * std::log2(1.0 + snr);
  const double v = 0.5 * (1.0 - 1.0 / ((1.0 + snr) * (1.0 + snr))) * log2e * log2e;
  return gaussian_tail((n * c - bits + 0.5 * std::log2(n)) / std::sqrt(n * v));
}

/// Packet error with bandwidth tied to N: snr = gamma0 * B0 * 2T / N.
inline double packet_error(double n, double gamma0, double b0, double t, double data, double meta, bool joint) {
  const double snr = gamma0 * b0 * 2.0 * t / n;
  if (joint) return awgn_error(n, snr, data + meta);
  const double ed = awgn_error(n / 2, snr, data), em = awgn_error(n / 2, snr, meta);
  return 1.0 - (1.0 - ed) * (1.0 - em);
}

struct GridHit {
  bool found = false;
  double n = 0.0;
  double cell = 0.0;
};

/// First point of a `points`-point linear grid over [n_lo, n_hi] whose packet
/// error is at most eps.
inline GridHit first_grid_crossing(double gamma0, double b0, double t, double data, double meta, bool joint,
                                   double eps, double n_lo, double n_hi, std::uint64_t points) {
  GridHit hit;
  hit.cell = (n_hi - n_lo) / static_cast<double>(points - 1);
  for (std::uint64_t i = 0; i < points; ++i) {
    const double n = n_lo + hit.cell * static_cast<double>(i);
    if (packet_error(n, gamma0, b0, t, data, meta, joint) <= eps) {
      hit.found = true;
      hit.n = n;
      return hit;
    }
  }
  return hit;
}

}  // namespace oracle

#include <vector>

namespace oracle {

/// Exact occurrence-count histogram by enumerating all 2^payload payloads.
/// counts[i] is the number of payloads with exactly i reproductions.
inline std::vector<std::uint64_t> enumerate_occurrences(const std::vector<std::uint8_t>& marker,
                                                        std::size_t payload_bits) {
  const std::size_t m = marker.size();
  std::vector<std::uint64_t> counts(payload_bits + 1, 0);
  std::vector<std::uint8_t> packet(m + payload_bits);
  for (std::size_t i = 0; i < m; ++i) packet[i] = marker[i];
  for (std::uint64_t p = 0; p < (std::uint64_t{1} << payload_bits); ++p) {
    for (std::size_t i = 0; i < payload_bits; ++i) packet[m + i] = (p >> i) & 1u;
    std::size_t c = 0;
    for (std::size_t j = 1; j <= payload_bits; ++j) {
      bool eq = true;
      for (std::size_t i = 0; i < m && eq; ++i) eq = packet[j + i] == marker[i];
      c += eq ? 1 : 0;
    }
    ++counts[c];
  }
  return counts;
}

}  // namespace oracle
