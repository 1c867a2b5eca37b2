// SPDX-License-Identifier: Apache-2.0

#include "urllc/fbl.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "urllc/simcore/numerics.hpp"

namespace urllc::fbl {
namespace {

constexpr double kLog2e = std::numbers::log2e;
// Below this dispersion the normal approximation degenerates to a step.
constexpr double kMinDispersion = 1e-300;
// Coarse log grid resolution used to find the first crossing.
constexpr int kGridPointsPerOctave = 32;

}  // namespace

void LinkBudget::validate() const {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw std::invalid_argument("gamma0 must be positive");
  if (!(reference_bandwidth_hz > 0.0) || !std::isfinite(reference_bandwidth_hz)) {
    throw std::invalid_argument("reference bandwidth must be positive");
  }
  if (!(latency_s > 0.0) || !std::isfinite(latency_s)) throw std::invalid_argument("latency must be positive");
}

void PacketSpec::validate() const {
  if (data_bits < 1) throw std::invalid_argument("data_bits must be >= 1");
}

std::string_view to_string(Encoding e) { return e == Encoding::joint ? "joint" : "separate"; }

Encoding parse_encoding(std::string_view s) {
  if (s == "joint") return Encoding::joint;
  if (s == "separate") return Encoding::separate;
  throw std::invalid_argument("unknown encoding '" + std::string(s) + "'");
}

AwgnParams awgn_params(double snr) {
  if (!(snr >= 0.0)) throw std::invalid_argument("awgn_params: snr must be >= 0");
  const double capacity = 0.5 * std::log2(1.0 + snr);
  const double dispersion = snr * (snr + 2.0) / (2.0 * (snr + 1.0) * (snr + 1.0)) * kLog2e * kLog2e;
  return {capacity, dispersion};
}

double error_prob(double channel_uses, double snr, double bits) {
  if (!(channel_uses >= 1.0)) throw std::invalid_argument("error_prob: channel uses must be >= 1");
  if (!(snr > 0.0)) throw std::invalid_argument("error_prob: snr must be positive");
  if (!(bits >= 0.0)) throw std::invalid_argument("error_prob: bits must be >= 0");
  const auto [capacity, dispersion] = awgn_params(snr);
  const double numerator = channel_uses * capacity - bits + 0.5 * std::log2(channel_uses);
  if (dispersion < kMinDispersion) {
    if (numerator > 0.0) return 0.0;
    return numerator < 0.0 ? 1.0 : 0.5;
  }
  return simcore::q_function(numerator / std::sqrt(channel_uses * dispersion));
}

double snr_at_bandwidth(const LinkBudget& budget, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  return budget.gamma0 * budget.reference_bandwidth_hz / bandwidth_hz;
}

double information_ceiling_bits(const LinkBudget& budget) {
  return budget.gamma0 * budget.reference_bandwidth_hz * budget.latency_s * kLog2e;
}

double min_channel_uses(Encoding mode) { return mode == Encoding::joint ? 1.0 : 2.0; }

double packet_error(const LinkBudget& budget, const PacketSpec& pkt, double channel_uses, Encoding mode) {
  const double bandwidth = channel_uses / (2.0 * budget.latency_s);
  const double snr = snr_at_bandwidth(budget, bandwidth);
  if (mode == Encoding::joint) return error_prob(channel_uses, snr, static_cast<double>(pkt.total_bits()));
  const double half = 0.5 * channel_uses;
  const double e_meta = error_prob(half, snr, static_cast<double>(pkt.metadata_bits));
  const double e_data = error_prob(half, snr, static_cast<double>(pkt.data_bits));
  // 1 - (1 - e_meta)(1 - e_data) without cancellation.
  return e_meta + e_data - e_meta * e_data;
}

BandwidthSolution min_bandwidth(const LinkBudget& budget, const PacketSpec& pkt, double eps_target, Encoding mode) {
  budget.validate();
  pkt.validate();
  if (!(eps_target > 0.0 && eps_target < 1.0)) throw std::invalid_argument("eps_target must lie in (0, 1)");

  const double ceiling = information_ceiling_bits(budget);
  if (mode == Encoding::joint) {
    if (static_cast<double>(pkt.total_bits()) >= ceiling) return {};
  } else {
    const double largest = static_cast<double>(std::max(pkt.data_bits, pkt.metadata_bits));
    if (largest >= 0.5 * ceiling) return {};
  }

  auto excess = [&](double n) { return packet_error(budget, pkt, n, mode) - eps_target; };

  const double n_min = min_channel_uses(mode);
  const double step = std::exp2(1.0 / kGridPointsPerOctave);
  double prev = n_min;
  double n = n_min;
  double solution = -1.0;
  if (excess(n) <= 0.0) {
    solution = n;
  } else {
    while (n < kMaxChannelUses) {
      prev = n;
      n = std::min(n * step, kMaxChannelUses);
      if (excess(n) <= 0.0) {
        // excess(prev) > 0 >= excess(n): keep the upper end feasible.
        const double tol = simcore::kRelativeTolerance * prev;
        double lo = prev;
        double hi = n;
        while (hi - lo > tol) {
          const double mid = 0.5 * (lo + hi);
          if (excess(mid) <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        solution = hi;
        break;
      }
    }
  }
  if (solution < 0.0) return {};

  BandwidthSolution out;
  out.feasible = true;
  out.channel_uses = solution;
  out.bandwidth_hz = solution / (2.0 * budget.latency_s);
  out.channel_uses_int = static_cast<std::uint64_t>(std::ceil(solution));
  out.bandwidth_int_hz = static_cast<double>(out.channel_uses_int) / (2.0 * budget.latency_s);
  return out;
}

}  // namespace urllc::fbl
