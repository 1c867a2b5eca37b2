// SPDX-License-Identifier: Apache-2.0

#include "urllc/multiconn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace urllc::multiconn {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void ReliabilityChain::validate() const {
  if (interfaces.empty()) throw std::invalid_argument("reliability chain needs at least one interface");
  for (const auto& i : interfaces) {
    if (!is_probability(i.link) || !is_probability(i.core)) {
      throw std::invalid_argument("link and core reliabilities must lie in [0, 1]");
    }
  }
  if (!is_probability(far_end)) throw std::invalid_argument("far-end reliability must lie in [0, 1]");
}

std::string_view to_string(Architecture a) {
  switch (a) {
    case Architecture::single: return "single";
    case Architecture::dual_connectivity: return "dc";
    case Architecture::interface_diversity: return "ifd";
  }
  return "unknown";
}

Architecture parse_architecture(std::string_view s) {
  if (s == "single") return Architecture::single;
  if (s == "dc") return Architecture::dual_connectivity;
  if (s == "ifd") return Architecture::interface_diversity;
  throw std::invalid_argument("unknown architecture '" + std::string(s) + "'");
}

double reliability(const ReliabilityChain& chain, Architecture arch) {
  chain.validate();
  const auto& first = chain.interfaces.front();
  switch (arch) {
    case Architecture::single:
      return first.link * first.core * chain.far_end;
    case Architecture::dual_connectivity: {
      double all_links_fail = 1.0;
      for (const auto& i : chain.interfaces) all_links_fail *= 1.0 - i.link;
      return (1.0 - all_links_fail) * first.core * chain.far_end;
    }
    case Architecture::interface_diversity: {
      double all_paths_fail = 1.0;
      for (const auto& i : chain.interfaces) all_paths_fail *= 1.0 - i.link * i.core;
      return (1.0 - all_paths_fail) * chain.far_end;
    }
  }
  throw std::invalid_argument("unknown architecture");
}

ReliabilityChain cellular_wifi_chain() { return {{kCellularDefaults, kWifiDefaults}, kFarEndDefault}; }

std::vector<OutageRow> outage_sweep(const ReliabilityChain& chain_template, const std::vector<std::size_t>& varying,
                                    const std::vector<double>& grid, const std::vector<Architecture>& archs) {
  chain_template.validate();
  for (auto idx : varying) {
    if (idx >= chain_template.interfaces.size()) throw std::invalid_argument("varying interface index out of range");
  }
  std::vector<OutageRow> rows;
  rows.reserve(grid.size() * archs.size());
  for (double g : grid) {
    if (!is_probability(g)) throw std::invalid_argument("link outage grid values must lie in [0, 1]");
    ReliabilityChain chain = chain_template;
    for (auto idx : varying) chain.interfaces[idx].link = 1.0 - g;
    for (auto arch : archs) rows.push_back({g, arch, 1.0 - reliability(chain, arch)});
  }
  return rows;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("log_grid: need 0 < lo <= hi");
  if (points == 0) throw std::invalid_argument("log_grid: points must be positive");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace urllc::multiconn
