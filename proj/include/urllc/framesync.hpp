// SPDX-License-Identifier: Apache-2.0
//
// Marker-based frame synchronization.
//
// A packet is a known marker followed by uniformly random payload bits. A
// sliding correlator locks on the wrong offset whenever the marker reappears
// inside the packet. The number C of such reproductions, counted over offsets
// 1 .. payload_bits, drives upper bounds on the probability of correct
// synchronization for single-shot and list synchronizers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "urllc/simcore/monte_carlo.hpp"

namespace urllc::framesync {

/// Longest marker handled by the exact occurrence computation.
inline constexpr std::size_t kMaxMarkerLength = 64;

class Marker {
 public:
  explicit Marker(std::vector<std::uint8_t> bits);
  /// Parses a string of '0'/'1' characters.
  static Marker from_string(std::string_view bits);
  /// 1010... of the given length.
  static Marker alternating(std::size_t length);
  /// Marker whose bit i is bit (length-1-i) of `value`.
  static Marker from_integer(std::uint64_t value, std::size_t length);

  std::size_t size() const { return bits_.size(); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::string to_string() const;

  friend bool operator==(const Marker&, const Marker&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OccurrenceOptions {
  std::size_t count_cap = 32;
  bool lump_tail = true;  ///< otherwise mass above the cap raises CapExceededError
};

struct OccurrenceDistribution {
  std::vector<double> probs;  ///< probs[i] = Pr{C = i}, i <= cap
  double tail_mass = 0.0;     ///< Pr{C > cap}

  double total() const;
  /// Largest i with nonzero probability, ignoring the tail.
  std::size_t max_count() const;
};

/// Exact distribution of the number of marker reproductions.
OccurrenceDistribution occurrence_distribution(const Marker& marker, std::size_t payload_bits,
                                               const OccurrenceOptions& options = {});

/// Sum_i Pr{C=i} / (i+1). Tail mass contributes nothing.
double p_ub(const OccurrenceDistribution& dist);
/// 1 - p_ub(dist), accumulated directly so that tiny deficits keep precision.
double p_ub_deficit(const OccurrenceDistribution& dist);
/// Pr{C < l} + Sum_{i>=l} l Pr{C=i} / (i+1). Tail mass contributes nothing.
double p_ub_list(const OccurrenceDistribution& dist, std::size_t list_size);

struct SearchOptions {
  std::size_t budget = 1000;           ///< evaluations for the randomized search
  std::uint64_t seed = 1;
  std::size_t exhaustive_limit = 16;   ///< lengths up to this are enumerated
};

/// Marker of the given length maximizing p_ub among the candidates evaluated.
/// Enumerates every marker up to `exhaustive_limit` bits; beyond that runs a
/// seeded first-improvement hill climb over single bit flips, always
/// including the alternating marker as a candidate.
Marker search_marker(std::size_t length, std::size_t payload_bits, const SearchOptions& options = {});

struct SyncEstimate {
  double probability = 0.0;  ///< fraction of trials locking on offset 0
  double sigma = 0.0;        ///< binomial standard error
  std::uint64_t trials = 0;
};

/// Monte-Carlo correlation synchronizer over BPSK symbols.
///
/// Each trial draws payload bits, optionally adds white Gaussian noise at
/// `snr_db` (symbol energy over noise variance per real sample), correlates
/// the marker against every window of the packet and picks the maximum,
/// breaking ties uniformly. Without `snr_db` the channel is noiseless.
SyncEstimate simulate_sync(const Marker& marker, std::size_t payload_bits, std::optional<double> snr_db,
                           const simcore::MonteCarloConfig& mc);

}  // namespace urllc::framesync
