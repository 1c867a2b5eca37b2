// SPDX-License-Identifier: Apache-2.0
//
// Series/parallel reliability of single-link, dual-connectivity and
// interface-diversity architectures. Failures are independent across
// components.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace urllc::multiconn {

struct InterfaceReliability {
  double link = 1.0;
  double core = 1.0;
};

struct ReliabilityChain {
  std::vector<InterfaceReliability> interfaces;
  double far_end = 1.0;

  void validate() const;
};

enum class Architecture {
  single,               ///< interface 1 only
  dual_connectivity,    ///< parallel links, one shared core (interface 1's)
  interface_diversity,  ///< parallel link+core paths
};

std::string_view to_string(Architecture a);
Architecture parse_architecture(std::string_view s);

double reliability(const ReliabilityChain& chain, Architecture arch);

/// Default component reliabilities: LTE/5G and Wi-Fi interfaces.
inline constexpr InterfaceReliability kCellularDefaults{0.99, 0.999};
inline constexpr InterfaceReliability kWifiDefaults{0.9, 0.99};
inline constexpr double kFarEndDefault = 0.9999;

/// Cellular interface followed by a Wi-Fi interface, default values.
ReliabilityChain cellular_wifi_chain();

struct OutageRow {
  double link_outage;
  Architecture arch;
  double e2e_outage;
};

/// For each grid value g, sets r_l = 1 - g on every interface listed in
/// `varying` (zero-based) and reports 1 - reliability for each architecture.
std::vector<OutageRow> outage_sweep(const ReliabilityChain& chain_template, const std::vector<std::size_t>& varying,
                                    const std::vector<double>& grid, const std::vector<Architecture>& archs);

/// `points` log-spaced values from lo to hi, endpoints exact.
std::vector<double> log_grid(double lo, double hi, std::size_t points);

}  // namespace urllc::multiconn
