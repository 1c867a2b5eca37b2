// SPDX-License-Identifier: Apache-2.0

#include "urllc/cli/run.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "urllc/cli/scenario.hpp"

namespace urllc::cli {
namespace {

using detail::Output;

struct Leaf {
  CLI::App* app = nullptr;
  std::function<Output(const detail::Context&)> execute;
};

bool is_flag_for(const std::string& token, const std::string& name) {
  const std::string flag = "--" + name;
  return token == flag || token.rfind(flag + "=", 0) == 0;
}

// Pulls `--scenario PATH` / `--scenario=PATH` out of the token list.
std::optional<std::string> extract_scenario(std::vector<std::string>& tokens) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < tokens.size();) {
    if (tokens[i] == "--scenario") {
      if (i + 1 >= tokens.size()) throw std::invalid_argument("--scenario requires a file path");
      if (path) throw std::invalid_argument("--scenario given more than once");
      path = tokens[i + 1];
      tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.begin() + static_cast<std::ptrdiff_t>(i + 2));
    } else if (tokens[i].rfind("--scenario=", 0) == 0) {
      if (path) throw std::invalid_argument("--scenario given more than once");
      path = tokens[i].substr(11);
      tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return path;
}

// Index just past the deepest subcommand token, together with that
// subcommand and its top-level ancestor.
struct SubcommandPosition {
  std::size_t insert_at = 0;
  CLI::App* top = nullptr;
  CLI::App* leaf = nullptr;
};

SubcommandPosition locate_subcommand(CLI::App& app, const std::vector<std::string>& tokens) {
  SubcommandPosition pos;
  CLI::App* current = &app;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    CLI::App* sub = current->get_subcommand_no_throw(tokens[i]);
    if (sub == nullptr) continue;
    if (pos.top == nullptr) pos.top = sub;
    pos.leaf = sub;
    pos.insert_at = i + 1;
    current = sub;
  }
  return pos;
}

void apply_scenario(CLI::App& app, std::vector<std::string>& tokens, const std::string& path) {
  const Scenario scenario = load_scenario(path);
  const SubcommandPosition pos = locate_subcommand(app, tokens);
  if (pos.leaf == nullptr) throw std::invalid_argument("--scenario needs a subcommand");
  if (scenario.module && *scenario.module != pos.top->get_name()) {
    throw ScenarioError("scenario key 'module' is '" + *scenario.module + "' but the subcommand is '" +
                            pos.top->get_name() + "'",
                        "module");
  }
  std::vector<std::string> expanded;
  for (const auto& e : scenario.entries) {
    const std::string flag = "--" + e.key;
    const bool known = e.key != "scenario" && e.key != "help" &&
                       (pos.leaf->get_option_no_throw(flag) != nullptr || app.get_option_no_throw(flag) != nullptr);
    if (!known) throw ScenarioError("unknown scenario key '" + e.key + "'", e.key);
    const bool explicit_flag =
        std::any_of(tokens.begin(), tokens.end(), [&](const std::string& t) { return is_flag_for(t, e.key); });
    if (!explicit_flag) expanded.push_back(flag + "=" + e.value);
  }
  tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos.insert_at), expanded.begin(), expanded.end());
}

std::string join_command(const std::vector<std::string>& args) {
  std::string s = "urllc";
  for (const auto& a : args) s += " " + a;
  return s;
}

bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    err << "error: cannot open '" << path << "' for writing\n";
    return false;
  }
  f << content;
  f.close();
  if (!f) {
    err << "error: failed writing '" << path << "'\n";
    return false;
  }
  return true;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reliability and latency analysis toolkit for short-packet wireless links", "urllc"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  detail::GlobalOptions global;
  app.add_option("--seed", global.seed, "Master seed for every random stream")->capture_default_str();
  app.add_option("--trials", global.trials, "Monte-Carlo trials (0 keeps the subcommand default)");
  app.add_option("--out", global.out, "Output file (default: standard output)");
  app.add_option("--workers", global.workers, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();

  std::vector<Leaf> leaves;
  std::string scenario_help;
  auto add_scenario_flag = [&](CLI::App* leaf) {
    leaf->add_option("--scenario", scenario_help, "key = value file with defaults for this subcommand's flags");
    leaf->fallthrough();
  };

  // fbl sweep
  detail::FblOptions fbl_o;
  auto* fbl = app.add_subcommand("fbl", "Finite-blocklength bandwidth requirements")->require_subcommand(1);
  fbl->fallthrough();
  auto* fbl_sweep = fbl->add_subcommand("sweep", "Minimum bandwidth versus reference SNR");
  fbl_sweep->add_option("--gamma-min-db", fbl_o.gamma_min_db, "Lowest reference SNR")->capture_default_str();
  fbl_sweep->add_option("--gamma-max-db", fbl_o.gamma_max_db, "Highest reference SNR")->capture_default_str();
  fbl_sweep->add_option("--points", fbl_o.points, "Number of SNR points")->capture_default_str();
  fbl_sweep->add_option("--bandwidth-hz", fbl_o.bandwidth_hz, "Reference bandwidth B0")->capture_default_str();
  fbl_sweep->add_option("--latency-ms", fbl_o.latency_ms, "Latency budget T")->capture_default_str();
  fbl_sweep->add_option("--data-bytes", fbl_o.data_bytes, "Data size D")->capture_default_str();
  fbl_sweep->add_option("--metadata-bytes", fbl_o.metadata_bytes, "Metadata size M")->capture_default_str();
  fbl_sweep->add_option("--eps", fbl_o.eps, "Target packet error probability")->capture_default_str();
  add_scenario_flag(fbl_sweep);
  leaves.push_back({fbl_sweep, [&](const detail::Context& c) { return detail::run_fbl_sweep(c, fbl_o); }});

  // access
  detail::AccessOptions acc_o;
  auto* acc = app.add_subcommand("access", "Error probability of an access protocol");
  acc->add_option("--scheme", acc_o.scheme, "static, four_step, three_step or grant_free")->capture_default_str();
  acc->add_option("--eps-sync", acc_o.eps_sync, "Synchronization error")->capture_default_str();
  acc->add_option("--eps-request", acc_o.eps_request, "Request error")->capture_default_str();
  acc->add_option("--eps-grant", acc_o.eps_grant, "Grant error")->capture_default_str();
  acc->add_option("--eps-data", acc_o.eps_data, "Data error")->capture_default_str();
  acc->add_option("--eps-ack", acc_o.eps_ack, "Acknowledgement error")->capture_default_str();
  acc->add_option("--cdf-out", acc_o.cdf_out, "Also write the retransmission latency CDF here");
  acc->add_option("--success-prob", acc_o.success_prob, "Per-attempt success probability")->capture_default_str();
  acc->add_option("--attempt-latency-ms", acc_o.attempt_latency_ms, "Latency of one attempt")->capture_default_str();
  acc->add_option("--max-attempts", acc_o.max_attempts, "Attempts before giving up")->capture_default_str();
  add_scenario_flag(acc);
  leaves.push_back({acc, [&](const detail::Context& c) { return detail::run_access(c, acc_o); }});

  // framesync sweep
  detail::FramesyncOptions fs_o;
  auto* fs = app.add_subcommand("framesync", "Frame synchronization bounds")->require_subcommand(1);
  fs->fallthrough();
  auto* fs_sweep = fs->add_subcommand("sweep", "P_UB of searched markers versus marker length");
  fs_sweep->add_option("--nm-min", fs_o.nm_min, "Shortest marker")->capture_default_str();
  fs_sweep->add_option("--nm-max", fs_o.nm_max, "Longest marker")->capture_default_str();
  fs_sweep->add_option("--payload-bits", fs_o.payload_bits, "Random bits after the marker")->capture_default_str();
  fs_sweep->add_option("--lists", fs_o.lists, "Comma-separated list sizes l")->capture_default_str();
  fs_sweep->add_option("--budget", fs_o.budget, "Evaluations per randomized marker search")->capture_default_str();
  fs_sweep->add_option("--exhaustive-limit", fs_o.exhaustive_limit, "Enumerate all markers up to this length")
      ->capture_default_str();
  fs_sweep->add_option("--count-cap", fs_o.count_cap, "Occurrence count cap")->capture_default_str();
  add_scenario_flag(fs_sweep);
  leaves.push_back({fs_sweep, [&](const detail::Context& c) { return detail::run_framesync_sweep(c, fs_o); }});

  // mimo
  detail::MimoOptions mimo_o;
  auto* mimo = app.add_subcommand("mimo", "Two-terminal zero-forcing beamforming evaluation");
  mimo->add_option("--bs-antennas", mimo_o.bs_antennas, "Array size M")->capture_default_str();
  mimo->add_option("--terminal-antennas", mimo_o.terminal_antennas, "Comma-separated N values")->capture_default_str();
  mimo->add_option("--paths", mimo_o.paths, "Paths per terminal")->capture_default_str();
  mimo->add_option("--center1-deg", mimo_o.center1_deg, "Departure cluster center, terminal 1")->capture_default_str();
  mimo->add_option("--center2-deg", mimo_o.center2_deg, "Departure cluster center, terminal 2")->capture_default_str();
  mimo->add_option("--cluster-spread-deg", mimo_o.cluster_spread_deg, "Departure angle spread")->capture_default_str();
  mimo->add_option("--arrival-spread-deg", mimo_o.arrival_spread_deg, "Arrival angle spread")->capture_default_str();
  mimo->add_option("--power-span-db", mimo_o.power_span_db, "Strongest over weakest path")->capture_default_str();
  mimo->add_option("--path-gain", mimo_o.path_gain, "Sum of path powers per terminal")->capture_default_str();
  mimo->add_option("--geometry-seed", mimo_o.geometry_seed, "Seed for the path angles")->capture_default_str();
  mimo->add_option("--rho-db", mimo_o.rho_db, "Total transmit power over noise")->capture_default_str();
  mimo->add_option("--multiplexing", mimo_o.multiplexing, "space and/or time")->capture_default_str();
  mimo->add_option("--methods", mimo_o.methods, "Comma-separated beamforming methods")->capture_default_str();
  mimo->add_option("--payload-bits", mimo_o.payload_bits, "BPSK payload per packet")->capture_default_str();
  mimo->add_option("--slots", mimo_o.slots, "Slots in the PER table")->capture_default_str();
  mimo->add_option("--coherent-packets", mimo_o.coherent_packets, "Packets per slot, coherent methods")
      ->capture_default_str();
  mimo->add_option("--noncoherent-packets", mimo_o.noncoherent_packets, "Packets per slot, other methods")
      ->capture_default_str();
  mimo->add_option("--estimation-noise", mimo_o.estimation_noise, "Projection estimate noise variance")
      ->capture_default_str();
  mimo->add_option("--sinr-out", mimo_o.sinr_out, "Also write the SINR summary table here");
  add_scenario_flag(mimo);
  leaves.push_back({mimo, [&](const detail::Context& c) { return detail::run_mimo(c, mimo_o); }});

  // multiconn sweep
  detail::MulticonnOptions mc_o;
  auto* mc = app.add_subcommand("multiconn", "Multi-connectivity reliability")->require_subcommand(1);
  mc->fallthrough();
  auto* mc_sweep = mc->add_subcommand("sweep", "End-to-end outage versus link outage");
  mc_sweep->add_option("--preset", mc_o.preset, "cellular_wifi, dual_cellular or reliable_core")->capture_default_str();
  mc_sweep->add_option("--points", mc_o.points, "Log-spaced grid points")->capture_default_str();
  mc_sweep->add_option("--outage-min", mc_o.outage_min, "Smallest link outage")->capture_default_str();
  mc_sweep->add_option("--outage-max", mc_o.outage_max, "Largest link outage")->capture_default_str();
  mc_sweep->add_option("--grid", mc_o.grid, "Explicit comma-separated link outages");
  mc_sweep->add_option("--archs", mc_o.archs, "Subset of single,dc,ifd,ifd_wifi");
  mc_sweep->add_option("--vary", mc_o.vary, "1-based interfaces whose link outage is swept");
  mc_sweep->add_option("--link1", mc_o.link1, "Link reliability, interface 1");
  mc_sweep->add_option("--core1", mc_o.core1, "Core reliability, interface 1");
  mc_sweep->add_option("--link2", mc_o.link2, "Link reliability, interface 2");
  mc_sweep->add_option("--core2", mc_o.core2, "Core reliability, interface 2");
  mc_sweep->add_option("--far-end", mc_o.far_end, "Far-end reliability");
  add_scenario_flag(mc_sweep);
  leaves.push_back({mc_sweep, [&](const detail::Context& c) { return detail::run_multiconn_sweep(c, mc_o); }});

  // ratesel sweep
  detail::RateselOptions rs_o;
  auto* rs = app.add_subcommand("ratesel", "Rate selection from channel training")->require_subcommand(1);
  rs->fallthrough();
  auto* rs_sweep = rs->add_subcommand("sweep", "Throughput ratio versus training length");
  rs_sweep->add_option("--theta", rs_o.theta, "Average channel power")->capture_default_str();
  rs_sweep->add_option("--eps", rs_o.eps, "Comma-separated target outages")->capture_default_str();
  rs_sweep->add_option("--xi", rs_o.xi, "Comma-separated PCR tolerances")->capture_default_str();
  rs_sweep->add_option("--n", rs_o.n, "Comma-separated training lengths")->capture_default_str();
  rs_sweep->add_option("--constraints", rs_o.constraints, "ar and/or pcr")->capture_default_str();
  add_scenario_flag(rs_sweep);
  leaves.push_back({rs_sweep, [&](const detail::Context& c) { return detail::run_ratesel_sweep(c, rs_o); }});

  std::vector<std::string> tokens = args;
  try {
    if (auto path = extract_scenario(tokens)) apply_scenario(app, tokens, *path);
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  const detail::Context ctx{global, join_command(args)};
  Output result;
  try {
    const auto it = std::find_if(leaves.begin(), leaves.end(), [](const Leaf& l) { return l.app->parsed(); });
    if (it == leaves.end()) {
      err << "error: no subcommand selected\n";
      return kExitInvalid;
    }
    result = it->execute(ctx);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  if (global.out.empty()) {
    out << result.primary;
  } else if (!write_file(global.out, result.primary, err)) {
    return kExitInvalid;
  }
  for (const auto& [path, content] : result.files) {
    if (!write_file(path, content, err)) return kExitInvalid;
  }
  if (result.exit_code == kExitInfeasible) err << "warning: some points are infeasible; see the output\n";
  return result.exit_code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace urllc::cli
