// SPDX-License-Identifier: Apache-2.0
//
// Subcommand bodies. Each takes its parsed options and returns the text to
// write; nothing here touches the file system.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "urllc/cli/run.hpp"
#include "urllc/simcore/monte_carlo.hpp"

namespace urllc::cli::detail {

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::uint64_t trials = 0;  ///< 0 selects the subcommand default
  std::string out;
  unsigned workers = 1;
};

struct Context {
  GlobalOptions global;
  std::string command_line;

  simcore::MonteCarloConfig mc(std::uint64_t default_trials) const {
    return {global.trials ? global.trials : default_trials, global.seed, global.workers};
  }
};

struct Output {
  std::string primary;  ///< goes to --out or stdout
  std::vector<std::pair<std::string, std::string>> files;  ///< extra (path, content)
  int exit_code = kExitOk;
};

struct FblOptions {
  double gamma_min_db = 10.0;
  double gamma_max_db = 40.0;
  std::uint64_t points = 20;
  double bandwidth_hz = 1e5;
  double latency_ms = 1.0;
  std::uint64_t data_bytes = 16;
  std::uint64_t metadata_bytes = 16;
  double eps = 1e-5;
};

struct AccessOptions {
  std::string scheme = "four_step";
  double eps_sync = 1e-5;
  double eps_request = 1e-5;
  double eps_grant = 1e-5;
  double eps_data = 1e-5;
  double eps_ack = 1e-5;
  std::string cdf_out;
  double success_prob = 0.9;
  double attempt_latency_ms = 1.0;
  std::uint64_t max_attempts = 4;
};

struct FramesyncOptions {
  std::uint64_t nm_min = 2;
  std::uint64_t nm_max = 32;
  std::uint64_t payload_bits = 256;
  std::string lists = "1,2,4,8";
  std::uint64_t budget = 1000;
  std::uint64_t exhaustive_limit = 16;
  std::uint64_t count_cap = 32;
};

struct MulticonnOptions {
  std::string preset = "dual_cellular";
  std::uint64_t points = 50;
  double outage_min = 1e-5;
  double outage_max = 1e-1;
  std::string grid;   ///< explicit list, overrides the log grid
  std::string archs;  ///< empty selects the preset's series
  std::string vary;   ///< 1-based interface indices, empty selects the preset's
  double link1 = -1.0, core1 = -1.0, link2 = -1.0, core2 = -1.0, far_end = -1.0;  ///< < 0 keeps the preset
};

struct RateselOptions {
  double theta = 10.0;
  std::string eps = "1e-2,1e-3";
  std::string xi = "1e-2";
  std::string n = "10,20,50,100,200,500,1000,2000,5000,10000";
  std::string constraints = "ar,pcr";
};

struct MimoOptions {
  std::uint64_t bs_antennas = 100;
  std::string terminal_antennas = "1,2,4";
  std::uint64_t paths = 10;
  double center1_deg = -4.0;
  double center2_deg = 4.0;
  double cluster_spread_deg = 10.0;
  double arrival_spread_deg = 120.0;
  double power_span_db = 20.0;
  double path_gain = 200.0;
  std::uint64_t geometry_seed = 1;
  double rho_db = 0.0;
  std::string multiplexing = "space,time";
  std::string methods = "interference_free,all_sv_coh,strongest_sv_inst,all_sv_ncoh,strongest_sv_av";
  std::uint64_t payload_bits = 100;
  std::uint64_t slots = 10;
  std::uint64_t coherent_packets = 1;
  std::uint64_t noncoherent_packets = 2;
  double estimation_noise = 0.0;
  std::string sinr_out;
};

inline constexpr std::uint64_t kRateselDefaultTrials = 100000;
inline constexpr std::uint64_t kMimoDefaultTrials = 10000;

Output run_fbl_sweep(const Context& ctx, const FblOptions& o);
Output run_access(const Context& ctx, const AccessOptions& o);
Output run_framesync_sweep(const Context& ctx, const FramesyncOptions& o);
Output run_multiconn_sweep(const Context& ctx, const MulticonnOptions& o);
Output run_ratesel_sweep(const Context& ctx, const RateselOptions& o);
Output run_mimo(const Context& ctx, const MimoOptions& o);

}  // namespace urllc::cli::detail
