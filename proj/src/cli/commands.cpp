// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "urllc/access.hpp"
#include "urllc/cli/format.hpp"
#include "urllc/fbl.hpp"
#include "urllc/framesync.hpp"
#include "urllc/mimo.hpp"
#include "urllc/multiconn.hpp"
#include "urllc/ratesel.hpp"

namespace urllc::cli::detail {
namespace {

void write_preamble(CsvBuilder& csv, const Context& ctx, std::uint64_t trials) {
  csv.comment(ctx.command_line);
  std::string line = "seed=" + std::to_string(ctx.global.seed);
  if (trials) line += " trials=" + std::to_string(trials);
  csv.comment(line);
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) { return format_number(x); }
std::string num(std::uint64_t x) { return std::to_string(x); }

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

Output run_fbl_sweep(const Context& ctx, const FblOptions& o) {
  require(o.points >= 1, "points must be >= 1");
  require(std::isfinite(o.gamma_min_db) && std::isfinite(o.gamma_max_db) && o.gamma_max_db >= o.gamma_min_db,
          "need finite gamma-min-db <= gamma-max-db");
  require(o.eps > 0.0 && o.eps < 1.0, "eps must lie in (0, 1)");
  fbl::LinkBudget budget{1.0, o.bandwidth_hz, o.latency_ms * 1e-3};
  const fbl::PacketSpec pkt{o.data_bytes * 8, o.metadata_bytes * 8};
  pkt.validate();

  CsvBuilder csv;
  write_preamble(csv, ctx, 0);
  csv.comment("B0_Hz=" + num(o.bandwidth_hz) + " T_s=" + num(budget.latency_s) + " D_bits=" + num(pkt.data_bits) +
              " M_bits=" + num(pkt.metadata_bits) + " eps=" + num(o.eps));
  csv.header({"gamma0_dB", "B_joint_Hz", "B_separate_Hz", "feasible_joint", "feasible_separate", "N_joint_int",
              "N_separate_int"});
  std::vector<std::string> infeasible;
  for (std::uint64_t k = 0; k < o.points; ++k) {
    const double g_db = o.points == 1 ? o.gamma_min_db
                                      : o.gamma_min_db + (o.gamma_max_db - o.gamma_min_db) * static_cast<double>(k) /
                                                             static_cast<double>(o.points - 1);
    budget.gamma0 = std::pow(10.0, g_db / 10.0);
    budget.validate();
    const auto joint = fbl::min_bandwidth(budget, pkt, o.eps, fbl::Encoding::joint);
    const auto separate = fbl::min_bandwidth(budget, pkt, o.eps, fbl::Encoding::separate);
    auto bw = [](const fbl::BandwidthSolution& s) { return s.feasible ? num(s.bandwidth_hz) : num(kInf); };
    auto n_int = [](const fbl::BandwidthSolution& s) { return s.feasible ? num(s.channel_uses_int) : num(kInf); };
    csv.row({num(g_db), bw(joint), bw(separate), joint.feasible ? "1" : "0", separate.feasible ? "1" : "0",
             n_int(joint), n_int(separate)});
    if (!joint.feasible) infeasible.push_back("gamma0_dB=" + num(g_db) + " encoding=joint");
    if (!separate.feasible) infeasible.push_back("gamma0_dB=" + num(g_db) + " encoding=separate");
  }
  for (const auto& s : infeasible) csv.comment("infeasible: " + s);
  return {csv.str(), {}, infeasible.empty() ? kExitOk : kExitInfeasible};
}

Output run_access(const Context& ctx, const AccessOptions& o) {
  const access::Scheme scheme = access::parse_scheme(o.scheme);
  const access::AccessErrorProfile profile{o.eps_sync, o.eps_request, o.eps_grant, o.eps_data, o.eps_ack};
  const double error = access::scheme_error(scheme, profile);

  nlohmann::ordered_json j;
  j["scheme"] = std::string(access::to_string(scheme));
  j["overall_error"] = error;
  j["parameters"] = {{"eps_sync", o.eps_sync},
                     {"eps_request", o.eps_request},
                     {"eps_grant", o.eps_grant},
                     {"eps_data", o.eps_data},
                     {"eps_ack", o.eps_ack}};
  j["seed"] = ctx.global.seed;
  j["command"] = ctx.command_line;
  Output out{j.dump(2) + "\n", {}, kExitOk};

  if (!o.cdf_out.empty()) {
    require(o.max_attempts >= 1 && o.max_attempts <= 1000000, "max-attempts must lie in [1, 1000000]");
    const access::RetransmissionModel model{o.success_prob, o.attempt_latency_ms * 1e-3,
                                            static_cast<std::uint32_t>(o.max_attempts)};
    const auto cdf = access::latency_cdf(model);
    CsvBuilder csv;
    write_preamble(csv, ctx, 0);
    csv.comment("success_prob=" + num(o.success_prob) + " residual_loss=" + num(cdf.residual_loss()));
    csv.header({"attempt", "latency_s", "probability", "cumulative"});
    std::uint64_t attempt = 1;
    for (const auto& s : cdf.steps()) csv.row({num(attempt++), num(s.latency_s), num(s.height), num(s.cumulative)});
    out.files.emplace_back(o.cdf_out, csv.str());
  }
  return out;
}

Output run_framesync_sweep(const Context& ctx, const FramesyncOptions& o) {
  require(o.nm_min >= 2 && o.nm_min <= o.nm_max && o.nm_max <= framesync::kMaxMarkerLength,
          "need 2 <= nm-min <= nm-max <= " + std::to_string(framesync::kMaxMarkerLength));
  require(o.payload_bits >= 1, "payload-bits must be >= 1");
  require(o.count_cap >= 1, "count-cap must be >= 1");
  require(o.budget >= 1, "budget must be >= 1");
  const auto lists = parse_uint_list(o.lists, "lists");
  for (auto l : lists) require(l >= 1, "list sizes must be >= 1");

  const framesync::SearchOptions search{o.budget, ctx.global.seed, o.exhaustive_limit};
  const framesync::OccurrenceOptions occ{o.count_cap, true};
  std::vector<std::string> markers;
  std::vector<std::vector<std::string>> rows;
  for (std::uint64_t m = o.nm_min; m <= o.nm_max; ++m) {
    const auto marker = framesync::search_marker(m, o.payload_bits, search);
    const auto dist = framesync::occurrence_distribution(marker, o.payload_bits, occ);
    markers.push_back("marker N_m=" + num(m) + " " + marker.to_string());
    for (auto l : lists) rows.push_back({num(m), num(l), num(framesync::p_ub_list(dist, l))});
  }

  CsvBuilder csv;
  write_preamble(csv, ctx, 0);
  csv.comment("payload_bits=" + num(o.payload_bits) + " count_cap=" + num(o.count_cap));
  for (const auto& s : markers) csv.comment(s);
  csv.header({"N_m", "l", "P_UB"});
  for (const auto& r : rows) csv.row(r);
  return {csv.str(), {}, kExitOk};
}

Output run_multiconn_sweep(const Context& ctx, const MulticonnOptions& o) {
  using multiconn::Architecture;
  multiconn::ReliabilityChain chain;
  std::vector<std::size_t> varying;
  bool wifi_series = false;
  if (o.preset == "cellular_wifi") {
    chain = multiconn::cellular_wifi_chain();
    varying = {0};
  } else if (o.preset == "dual_cellular") {
    chain = {{multiconn::kCellularDefaults, multiconn::kCellularDefaults}, multiconn::kFarEndDefault};
    varying = {0, 1};
    wifi_series = true;
  } else if (o.preset == "reliable_core") {
    const multiconn::InterfaceReliability cell{multiconn::kCellularDefaults.link, 0.9999};
    chain = {{cell, cell}, multiconn::kFarEndDefault};
    varying = {0, 1};
  } else {
    throw std::invalid_argument("unknown preset '" + o.preset + "' (expected cellular_wifi, dual_cellular or reliable_core)");
  }
  auto override_value = [](double v, double& target) {
    if (v >= 0.0) target = v;
  };
  override_value(o.link1, chain.interfaces[0].link);
  override_value(o.core1, chain.interfaces[0].core);
  override_value(o.link2, chain.interfaces[1].link);
  override_value(o.core2, chain.interfaces[1].core);
  override_value(o.far_end, chain.far_end);
  chain.validate();
  if (!o.vary.empty()) {
    varying.clear();
    for (auto i : parse_uint_list(o.vary, "vary")) {
      require(i >= 1 && i <= chain.interfaces.size(), "vary: interface index out of range");
      varying.push_back(i - 1);
    }
  }

  std::vector<Architecture> archs{Architecture::single, Architecture::dual_connectivity,
                                  Architecture::interface_diversity};
  if (!o.archs.empty()) {
    archs.clear();
    wifi_series = false;
    for (const auto& a : split_list(o.archs, "archs")) {
      if (a == "ifd_wifi") {
        wifi_series = true;
      } else {
        archs.push_back(multiconn::parse_architecture(a));
      }
    }
  }

  std::vector<double> grid;
  if (!o.grid.empty()) {
    grid = parse_double_list(o.grid, "grid");
  } else {
    require(o.points >= 1, "points must be >= 1");
    grid = multiconn::log_grid(o.outage_min, o.outage_max, o.points);
  }

  const auto rows = multiconn::outage_sweep(chain, varying, grid, archs);
  std::vector<multiconn::OutageRow> wifi_rows;
  if (wifi_series) {
    wifi_rows = multiconn::outage_sweep(multiconn::cellular_wifi_chain(), {0}, grid,
                                        {Architecture::interface_diversity});
  }

  CsvBuilder csv;
  write_preamble(csv, ctx, 0);
  std::string desc = "preset=" + o.preset + " far_end=" + num(chain.far_end);
  for (std::size_t i = 0; i < chain.interfaces.size(); ++i) {
    desc += " link" + num(std::uint64_t{i + 1}) + "=" + num(chain.interfaces[i].link) + " core" +
            num(std::uint64_t{i + 1}) + "=" + num(chain.interfaces[i].core);
  }
  csv.comment(desc);
  if (wifi_series) csv.comment("ifd_wifi: cellular + Wi-Fi defaults, cellular link varying");
  csv.header({"link_outage", "arch", "e2e_outage"});
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (std::size_t a = 0; a < archs.size(); ++a) {
      const auto& r = rows[p * archs.size() + a];
      csv.row({num(r.link_outage), std::string(multiconn::to_string(r.arch)), num(r.e2e_outage)});
    }
    if (wifi_series) csv.row({num(wifi_rows[p].link_outage), "ifd_wifi", num(wifi_rows[p].e2e_outage)});
  }
  return {csv.str(), {}, kExitOk};
}

Output run_ratesel_sweep(const Context& ctx, const RateselOptions& o) {
  const auto eps_list = parse_double_list(o.eps, "eps");
  const auto xi_list = parse_double_list(o.xi, "xi");
  const auto n_list = parse_uint_list(o.n, "n");
  std::vector<ratesel::Constraint> constraints;
  for (const auto& c : split_list(o.constraints, "constraints")) constraints.push_back(ratesel::parse_constraint(c));
  const auto mc = ctx.mc(kRateselDefaultTrials);
  mc.validate();
  // Validate the whole grid before spending any simulation time.
  for (double eps : eps_list) {
    for (double xi : xi_list) {
      for (auto n : n_list) ratesel::RayleighScenario{o.theta, eps, xi, n}.validate();
    }
  }

  CsvBuilder csv;
  write_preamble(csv, ctx, mc.trials);
  csv.comment("theta=" + num(o.theta));
  csv.header({"constraint", "n", "eps", "xi", "lambda", "ci_lo", "ci_hi"});
  std::vector<std::string> infeasible;
  for (auto c : constraints) {
    for (double eps : eps_list) {
      for (double xi : xi_list) {
        for (auto n : n_list) {
          const ratesel::RayleighScenario s{o.theta, eps, xi, n};
          std::vector<std::string> row{std::string(ratesel::to_string(c)), num(n), num(eps), num(xi)};
          try {
            const auto est = ratesel::throughput_ratio(s, c, mc);
            row.insert(row.end(), {num(est.lambda), num(est.ci_lo), num(est.ci_hi)});
          } catch (const ratesel::NoFeasibleBackoffError&) {
            row.insert(row.end(), {num(kNaN), num(kNaN), num(kNaN)});
            infeasible.push_back("constraint=" + row[0] + " n=" + row[1] + " eps=" + row[2] + " xi=" + row[3]);
          }
          csv.row(row);
        }
      }
    }
  }
  for (const auto& s : infeasible) csv.comment("infeasible: " + s);
  return {csv.str(), {}, infeasible.empty() ? kExitOk : kExitInfeasible};
}

Output run_mimo(const Context& ctx, const MimoOptions& o) {
  const auto n_list = parse_uint_list(o.terminal_antennas, "terminal-antennas");
  std::vector<mimo::Multiplexing> muxes;
  for (const auto& m : split_list(o.multiplexing, "multiplexing")) muxes.push_back(mimo::parse_multiplexing(m));
  std::vector<mimo::BeamMethod> methods;
  for (const auto& m : split_list(o.methods, "methods")) methods.push_back(mimo::parse_method(m));

  mimo::ScenarioParams params;
  params.bs_antennas = o.bs_antennas;
  params.paths_per_terminal = o.paths;
  params.cluster_center_deg = {o.center1_deg, o.center2_deg};
  params.cluster_spread_deg = o.cluster_spread_deg;
  params.arrival_spread_deg = o.arrival_spread_deg;
  params.power_span_db = o.power_span_db;
  params.path_gain_total = o.path_gain;
  params.geometry_seed = o.geometry_seed;

  mimo::EvaluationConfig cfg;
  cfg.methods = methods;
  cfg.rho_db = o.rho_db;
  cfg.payload_bits = o.payload_bits;
  cfg.slots = o.slots;
  cfg.coherent_packets_per_slot = o.coherent_packets;
  cfg.noncoherent_packets_per_slot = o.noncoherent_packets;
  cfg.estimation_noise_var = o.estimation_noise;
  const auto mc = ctx.mc(kMimoDefaultTrials);
  mc.validate();
  cfg.validate();
  for (auto n : n_list) {
    params.terminal_antennas = n;
    params.validate();
  }

  CsvBuilder per_csv, sinr_csv;
  for (auto* csv : {&per_csv, &sinr_csv}) {
    write_preamble(*csv, ctx, mc.trials);
    csv->comment("M=" + num(o.bs_antennas) + " paths=" + num(o.paths) + " rho_dB=" + num(o.rho_db) +
                 " path_gain=" + num(o.path_gain) + " geometry_seed=" + num(o.geometry_seed));
  }
  per_csv.header({"method", "N", "multiplexing", "slot", "PER"});
  sinr_csv.header({"method", "N", "multiplexing", "mean_sinr", "ci_lo", "ci_hi", "p05", "p25", "p50", "p75", "p95",
                   "packet_error"});
  for (auto n : n_list) {
    params.terminal_antennas = n;
    const auto spec = mimo::make_cluster_spec(params);
    for (auto mux : muxes) {
      cfg.multiplexing = mux;
      const auto eval = mimo::evaluate(spec, cfg, mc);
      const std::string mux_name(mimo::to_string(mux));
      for (const auto& me : eval.methods) {
        const std::string name(mimo::to_string(me.method));
        for (std::size_t t = 0; t < me.per_by_slot.size(); ++t) {
          per_csv.row({name, num(n), mux_name, num(std::uint64_t{t + 1}), num(me.per_by_slot[t])});
        }
        const auto& s = me.sinr;
        sinr_csv.row({name, num(n), mux_name, num(s.mean), num(s.ci_lo), num(s.ci_hi), num(s.p05), num(s.p25),
                      num(s.p50), num(s.p75), num(s.p95), num(me.mean_packet_error)});
      }
    }
  }
  Output out{per_csv.str(), {}, kExitOk};
  if (!o.sinr_out.empty()) out.files.emplace_back(o.sinr_out, sinr_csv.str());
  return out;
}

}  // namespace urllc::cli::detail
