// SPDX-License-Identifier: Apache-2.0
//
// Finite-blocklength reliability over the real AWGN channel and the
// minimum-bandwidth solver for jointly vs. separately encoded packets.
//
// A transmission of bandwidth B over latency T offers N = 2BT real channel
// uses. With fixed received power the SNR scales as gamma0 * B0 / B, so more
// bandwidth buys blocklength at the cost of per-symbol SNR.

#pragma once

#include <cstdint>
#include <string_view>

namespace urllc::fbl {

struct LinkBudget {
  double gamma0 = 1.0;                 ///< linear SNR at the reference bandwidth
  double reference_bandwidth_hz = 1e5;
  double latency_s = 1e-3;

  void validate() const;
};

struct PacketSpec {
  std::uint64_t data_bits = 128;
  std::uint64_t metadata_bits = 128;

  void validate() const;
  std::uint64_t total_bits() const { return data_bits + metadata_bits; }
};

enum class Encoding { joint, separate };

std::string_view to_string(Encoding e);
Encoding parse_encoding(std::string_view s);

struct AwgnParams {
  double capacity;    ///< bits per channel use
  double dispersion;  ///< bits^2 per channel use
};

AwgnParams awgn_params(double snr);

/// Normal approximation of the block error probability for `bits` information
/// bits over `channel_uses` uses at linear SNR `snr`.
double error_prob(double channel_uses, double snr, double bits);

double snr_at_bandwidth(const LinkBudget& budget, double bandwidth_hz);

/// Information carried by the whole budget as bandwidth grows without bound:
/// gamma0 * B0 * T * log2(e) bits.
double information_ceiling_bits(const LinkBudget& budget);

/// Packet error probability when `channel_uses` are available in total.
double packet_error(const LinkBudget& budget, const PacketSpec& pkt, double channel_uses, Encoding mode);

/// Smallest and largest blocklength explored by the solver.
inline constexpr double kMaxChannelUses = 4194304.0;  // 2^22
double min_channel_uses(Encoding mode);

struct BandwidthSolution {
  bool feasible = false;
  double channel_uses = 0.0;  ///< continuous N at the solution
  double bandwidth_hz = 0.0;  ///< N / (2T)
  std::uint64_t channel_uses_int = 0;  ///< ceil(N)
  double bandwidth_int_hz = 0.0;       ///< ceil(N) / (2T)
};

/// Smallest bandwidth (relative accuracy 1e-9 in N) whose packet error does
/// not exceed `eps_target`. Infeasible when a coded block carries at least its
/// share of the information ceiling, or when no N up to kMaxChannelUses meets
/// the target.
BandwidthSolution min_bandwidth(const LinkBudget& budget, const PacketSpec& pkt, double eps_target, Encoding mode);

}  // namespace urllc::fbl
