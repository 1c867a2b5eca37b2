// SPDX-License-Identifier: Apache-2.0

#include "urllc/mimo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "urllc/simcore/numerics.hpp"

namespace urllc::mimo {
namespace {

constexpr std::uint64_t kGeometryTag = 0x4D;
constexpr std::uint64_t kEvaluateTag = 0x31;
constexpr double kRankFloor = 1e-10;      // eigenvalues below this fraction of the largest are noise
constexpr double kBasisFloor = 1e-9;      // same for singular values of projected subspaces
constexpr double kDegenerateNorm = 1e-12;
constexpr double kZ95 = 1.959963984540054;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

void check_terminal(std::size_t terminal) {
  if (terminal >= kTerminals) throw std::invalid_argument("terminal index must be 0 or 1");
}

// Eigenpairs of a Hermitian matrix sorted by nonincreasing eigenvalue.
void sorted_eigen(const CMatrix& R, CMatrix& vectors, Eigen::VectorXd& values) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(R);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const Eigen::Index n = R.rows();
  vectors.resize(n, n);
  values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    values(i) = std::max(0.0, solver.eigenvalues()(n - 1 - i));
    vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
}

// Dominant eigenvector of G G^H, mapped back through G^H: the top right
// singular vector of G.
CVector top_right_singular_vector(const CMatrix& G) {
  if (G.rows() == 1) {
    CVector v = G.row(0).adjoint();
    const double n = v.norm();
    return n > 0.0 ? CVector(v / n) : v;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(G * G.adjoint());
  CVector v = G.adjoint() * solver.eigenvectors().col(G.rows() - 1);
  const double n = v.norm();
  return n > 0.0 ? CVector(v / n) : v;
}

CMatrix scaled(const CMatrix& f, double power) {
  const double n = f.norm();
  if (n < kDegenerateNorm) return CMatrix::Zero(f.rows(), f.cols());
  return f * (std::sqrt(power) / n);
}

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

void ClusterChannelSpec::validate() const {
  if (bs_antennas < 1) throw std::invalid_argument("bs_antennas must be >= 1");
  if (terminal_antennas < 1) throw std::invalid_argument("terminal_antennas must be >= 1");
  for (const auto& list : paths) {
    if (list.empty()) throw std::invalid_argument("every terminal needs at least one path");
    for (const auto& p : list) {
      if (!(p.power > 0.0) || !std::isfinite(p.power)) throw std::invalid_argument("path powers must be positive");
      if (!std::isfinite(p.departure_rad) || !std::isfinite(p.arrival_rad)) {
        throw std::invalid_argument("path angles must be finite");
      }
    }
  }
}

double ClusterChannelSpec::total_power(std::size_t terminal) const {
  check_terminal(terminal);
  double sum = 0.0;
  for (const auto& p : paths[terminal]) sum += p.power;
  return sum;
}

CVector steering_vector(std::size_t n, double angle_rad) {
  if (n < 1) throw std::invalid_argument("steering vector length must be >= 1");
  CVector s(static_cast<Eigen::Index>(n));
  const double phase = std::numbers::pi * std::sin(angle_rad);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t m = 0; m < n; ++m) s(static_cast<Eigen::Index>(m)) = std::polar(scale, phase * static_cast<double>(m));
  return s;
}

void ScenarioParams::validate() const {
  if (bs_antennas < 1) throw std::invalid_argument("bs_antennas must be >= 1");
  if (terminal_antennas < 1) throw std::invalid_argument("terminal_antennas must be >= 1");
  if (paths_per_terminal < 1) throw std::invalid_argument("paths_per_terminal must be >= 1");
  if (!(cluster_spread_deg >= 0.0 && cluster_spread_deg <= 180.0)) {
    throw std::invalid_argument("cluster_spread_deg must lie in [0, 180]");
  }
  if (!(arrival_spread_deg >= 0.0 && arrival_spread_deg <= 180.0)) {
    throw std::invalid_argument("arrival_spread_deg must lie in [0, 180]");
  }
  for (double c : cluster_center_deg) {
    if (!(c >= -90.0 && c <= 90.0)) throw std::invalid_argument("cluster centers must lie in [-90, 90] degrees");
  }
  if (!(power_span_db >= 0.0) || !std::isfinite(power_span_db)) throw std::invalid_argument("power_span_db must be >= 0");
  if (!(path_gain_total > 0.0) || !std::isfinite(path_gain_total)) {
    throw std::invalid_argument("path_gain_total must be positive");
  }
}

ClusterChannelSpec make_cluster_spec(const ScenarioParams& params) {
  params.validate();
  ClusterChannelSpec spec;
  spec.bs_antennas = params.bs_antennas;
  spec.terminal_antennas = params.terminal_antennas;
  const std::size_t L = params.paths_per_terminal;
  const double gain = params.path_gain_total;

  std::vector<double> weights(L, 1.0);
  for (std::size_t i = 1; i < L; ++i) {
    weights[i] = std::pow(10.0, -params.power_span_db / 10.0 * static_cast<double>(i) / static_cast<double>(L - 1));
  }
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;

  for (std::size_t k = 0; k < kTerminals; ++k) {
    simcore::SeededStream rng(params.geometry_seed, simcore::trial_substream(kGeometryTag, k));
    auto& list = spec.paths[k];
    list.resize(L);
    for (std::size_t i = 0; i < L; ++i) {
      const double dep = params.cluster_center_deg[k] + (rng.uniform() - 0.5) * params.cluster_spread_deg;
      const double arr = (rng.uniform() - 0.5) * params.arrival_spread_deg;
      list[i] = {deg_to_rad(dep), deg_to_rad(arr), gain * weights[i] / weight_sum};
    }
  }
  return spec;
}

ChannelSampler::ChannelSampler(const ClusterChannelSpec& spec)
    : bs_antennas_(spec.bs_antennas), terminal_antennas_(spec.terminal_antennas) {
  spec.validate();
  for (std::size_t k = 0; k < kTerminals; ++k) {
    for (const auto& p : spec.paths[k]) {
      paths_[k].push_back({steering_vector(terminal_antennas_, p.arrival_rad),
                           steering_vector(bs_antennas_, p.departure_rad).conjugate(), p.power});
    }
  }
}

ChannelRealization ChannelSampler::draw(simcore::SeededStream& stream) const {
  ChannelRealization ch;
  const auto n = static_cast<Eigen::Index>(terminal_antennas_);
  const auto m = static_cast<Eigen::Index>(bs_antennas_);
  for (std::size_t k = 0; k < kTerminals; ++k) {
    ch.H[k] = CMatrix::Zero(n, m);
    for (const auto& p : paths_[k]) {
      const std::complex<double> alpha = stream.complex_normal(p.power);
      ch.H[k].noalias() += (alpha * p.rx) * p.tx_conj.transpose();
    }
  }
  return ch;
}

ChannelRealization draw_channel(const ClusterChannelSpec& spec, simcore::SeededStream& stream) {
  return ChannelSampler(spec).draw(stream);
}

CovariancePair covariance(const ClusterChannelSpec& spec, std::size_t terminal) {
  spec.validate();
  check_terminal(terminal);
  const auto m = static_cast<Eigen::Index>(spec.bs_antennas);
  const auto n = static_cast<Eigen::Index>(spec.terminal_antennas);
  CovariancePair c;
  c.R_tx = CMatrix::Zero(m, m);
  c.R_rx = CMatrix::Zero(n, n);
  for (const auto& p : spec.paths[terminal]) {
    const CVector tx = steering_vector(spec.bs_antennas, p.departure_rad);
    const CVector rx = steering_vector(spec.terminal_antennas, p.arrival_rad);
    c.R_tx.noalias() += p.power * tx * tx.adjoint();
    c.R_rx.noalias() += p.power * rx * rx.adjoint();
  }
  sorted_eigen(c.R_tx, c.V, c.lambda);
  sorted_eigen(c.R_rx, c.U, c.lambda_rx);
  const double floor = kRankFloor * c.lambda(0);
  std::size_t rank = 0;
  while (rank < static_cast<std::size_t>(c.lambda.size()) && c.lambda(static_cast<Eigen::Index>(rank)) > floor) ++rank;
  c.rank = std::min(rank, spec.paths[terminal].size());
  return c;
}

std::string_view to_string(BeamMethod m) {
  switch (m) {
    case BeamMethod::interference_free: return "interference_free";
    case BeamMethod::all_sv_coh: return "all_sv_coh";
    case BeamMethod::strongest_sv_inst: return "strongest_sv_inst";
    case BeamMethod::all_sv_ncoh: return "all_sv_ncoh";
    case BeamMethod::strongest_sv_av: return "strongest_sv_av";
  }
  return "unknown";
}

BeamMethod parse_method(std::string_view s) {
  for (auto m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown beamforming method '" + std::string(s) + "'");
}

bool requires_csi(BeamMethod m) {
  return m == BeamMethod::interference_free || m == BeamMethod::all_sv_coh || m == BeamMethod::strongest_sv_inst;
}

bool is_zero_forcing(BeamMethod m) { return m != BeamMethod::interference_free; }

bool uses_aggregate_receiver(BeamMethod m) {
  return m == BeamMethod::interference_free || m == BeamMethod::all_sv_coh || m == BeamMethod::all_sv_ncoh;
}

std::string_view to_string(Multiplexing m) { return m == Multiplexing::space ? "space" : "time"; }

Multiplexing parse_multiplexing(std::string_view s) {
  if (s == "space") return Multiplexing::space;
  if (s == "time") return Multiplexing::time;
  throw std::invalid_argument("unknown multiplexing '" + std::string(s) + "'");
}

Beamformer::Beamformer(const std::array<CovariancePair, kTerminals>& covs, const PrecoderOptions& options)
    : options_(options) {
  if (!(options.total_power > 0.0)) throw std::invalid_argument("total power must be positive");
  if (!(options.estimation_noise_var >= 0.0)) throw std::invalid_argument("estimation noise variance must be >= 0");
  const bool zf = options.multiplexing == Multiplexing::space;
  per_user_power_ = options.total_power / (zf ? 2.0 : 1.0);
  const Eigen::Index m = covs[0].R_tx.rows();
  if (covs[1].R_tx.rows() != m) throw std::invalid_argument("covariances disagree on the array size");

  for (std::size_t k = 0; k < kTerminals; ++k) {
    const auto& own = covs[k];
    const auto& other = covs[1 - k];
    Terms& t = terms_[k];
    t.projection = CMatrix::Identity(m, m);
    if (zf) {
      const CMatrix V2 = other.signal_subspace();
      t.projection.noalias() -= V2 * V2.adjoint();
    }
    const CMatrix Vbar = own.signal_subspace();
    t.projected_svs = t.projection * Vbar;
    t.noncoherent = t.projected_svs * own.lambda.head(Vbar.cols()).cwiseSqrt().cast<std::complex<double>>().asDiagonal();
    t.strongest = t.projection * own.v_max();
    t.u_max = own.u_max();

    Eigen::JacobiSVD<CMatrix> svd(t.projected_svs, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index keep = 0;
    while (keep < sv.size() && sv(keep) > kBasisFloor * std::max(1.0, sv(0))) ++keep;
    t.coherent_basis = svd.matrixU().leftCols(keep);
  }
}

CMatrix Beamformer::precoder(BeamMethod method, std::size_t terminal, const ChannelRealization* csi,
                             simcore::SeededStream* stream) const {
  check_terminal(terminal);
  if (requires_csi(method) && csi == nullptr) throw MissingCsiError("missing CSI");
  const Terms& t = terms_[terminal];
  switch (method) {
    case BeamMethod::interference_free:
      return scaled(CMatrix(top_right_singular_vector(csi->H[terminal])), per_user_power_);
    case BeamMethod::all_sv_coh: {
      if (t.coherent_basis.cols() == 0) return CMatrix::Zero(t.projection.rows(), 1);
      const CMatrix G = csi->H[terminal] * t.coherent_basis;
      return scaled(CMatrix(t.coherent_basis * top_right_singular_vector(G)), per_user_power_);
    }
    case BeamMethod::strongest_sv_inst: {
      Eigen::RowVectorXcd proj = t.u_max.adjoint() * csi->H[terminal] * t.projected_svs;
      if (options_.estimation_noise_var > 0.0) {
        if (stream == nullptr) throw std::invalid_argument("estimation noise requires a random stream");
        for (Eigen::Index i = 0; i < proj.size(); ++i) proj(i) += stream->complex_normal(options_.estimation_noise_var);
      }
      Eigen::Index best = -1;
      double best_score = -1.0;
      for (Eigen::Index i = 0; i < proj.size(); ++i) {
        const double n2 = t.projected_svs.col(i).squaredNorm();
        if (n2 < kDegenerateNorm * kDegenerateNorm) continue;
        const double score = std::norm(proj(i)) / n2;
        if (score > best_score) {
          best_score = score;
          best = i;
        }
      }
      if (best < 0) return CMatrix::Zero(t.projection.rows(), 1);
      return scaled(CMatrix(t.projected_svs.col(best)), per_user_power_);
    }
    case BeamMethod::all_sv_ncoh:
      return scaled(t.noncoherent, per_user_power_);
    case BeamMethod::strongest_sv_av:
      return scaled(CMatrix(t.strongest), per_user_power_);
  }
  throw std::invalid_argument("unknown beamforming method");
}

CMatrix Beamformer::receiver(BeamMethod method, std::size_t terminal, const CMatrix& H, const CMatrix& F) const {
  check_terminal(terminal);
  if (uses_aggregate_receiver(method)) return H * F;
  return terms_[terminal].u_max.replicate(1, F.cols());
}

CMatrix build_precoder(BeamMethod method, std::size_t terminal, const std::array<CovariancePair, kTerminals>& covs,
                       const ChannelRealization* csi, const PrecoderOptions& options) {
  return Beamformer(covs, options).precoder(method, terminal, csi);
}

double sinr(const CMatrix& H, const CMatrix& F, const CMatrix& F_int, const CMatrix& G, double noise_var) {
  if (G.cols() != F.cols()) throw std::invalid_argument("one receive filter per stream is required");
  const double g2 = G.squaredNorm();
  if (g2 == 0.0) return 0.0;
  const double signal = std::norm((G.adjoint() * H * F).trace());
  const double interference = F_int.size() > 0 ? (G.adjoint() * H * F_int).squaredNorm() : 0.0;
  const double denom = interference + noise_var * g2;
  if (denom == 0.0) return signal > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return signal / denom;
}

double packet_error(double sinr_value, std::size_t payload_bits) {
  if (!(sinr_value >= 0.0)) throw std::invalid_argument("SINR must be >= 0");
  const double ber = simcore::q_function(std::sqrt(2.0 * sinr_value));
  return -std::expm1(static_cast<double>(payload_bits) * std::log1p(-ber));
}

void EvaluationConfig::validate() const {
  if (methods.empty()) throw std::invalid_argument("at least one beamforming method is required");
  if (!std::isfinite(rho_db)) throw std::invalid_argument("rho_db must be finite");
  if (payload_bits < 1) throw std::invalid_argument("payload_bits must be >= 1");
  if (slots < 1) throw std::invalid_argument("slots must be >= 1");
  if (!(total_power > 0.0)) throw std::invalid_argument("total_power must be positive");
  if (coherent_packets_per_slot < 1 || noncoherent_packets_per_slot < 1) {
    throw std::invalid_argument("packets per slot must be >= 1");
  }
  if (!(estimation_noise_var >= 0.0)) throw std::invalid_argument("estimation_noise_var must be >= 0");
}

std::size_t EvaluationConfig::packets_per_slot(BeamMethod m) const {
  const bool coherent = m == BeamMethod::interference_free || m == BeamMethod::all_sv_coh;
  return coherent ? coherent_packets_per_slot : noncoherent_packets_per_slot;
}

std::size_t EvaluationConfig::opportunities(BeamMethod m, std::size_t slot) const {
  // Time-multiplexed terminal 1 owns the odd slots.
  const std::size_t owned = multiplexing == Multiplexing::space ? slot : (slot + 1) / 2;
  return owned * packets_per_slot(m);
}

Evaluation evaluate(const ClusterChannelSpec& spec, const EvaluationConfig& config, const simcore::MonteCarloConfig& mc) {
  spec.validate();
  config.validate();
  mc.validate();
  const std::array<CovariancePair, kTerminals> covs{covariance(spec, 0), covariance(spec, 1)};
  const Beamformer bf(covs, {config.multiplexing, config.total_power, config.estimation_noise_var});
  const ChannelSampler sampler(spec);
  const double noise_var = config.total_power / std::pow(10.0, config.rho_db / 10.0);
  const std::size_t k = config.methods.size();
  const bool spatial = config.multiplexing == Multiplexing::space;

  struct Acc {
    std::vector<std::vector<double>> sinr, per;
    void merge(const Acc& o) {
      if (sinr.empty()) {
        *this = o;
        return;
      }
      for (std::size_t i = 0; i < sinr.size() && i < o.sinr.size(); ++i) {
        sinr[i].insert(sinr[i].end(), o.sinr[i].begin(), o.sinr[i].end());
        per[i].insert(per[i].end(), o.per[i].begin(), o.per[i].end());
      }
    }
  };

  auto acc = simcore::run_trials<Acc>(mc, kEvaluateTag, [&](simcore::SeededStream& rng, Acc& out) {
    if (out.sinr.empty()) {
      out.sinr.resize(k);
      out.per.resize(k);
    }
    const ChannelRealization ch = sampler.draw(rng);
    for (std::size_t i = 0; i < k; ++i) {
      const BeamMethod m = config.methods[i];
      const CMatrix f1 = bf.precoder(m, 0, &ch, &rng);
      CMatrix f2;
      if (spatial && is_zero_forcing(m)) f2 = bf.precoder(m, 1, &ch, &rng);
      const CMatrix g = bf.receiver(m, 0, ch.H[0], f1);
      const double s = sinr(ch.H[0], f1, f2, g, noise_var);
      out.sinr[i].push_back(s);
      out.per[i].push_back(packet_error(s, config.payload_bits));
    }
  });

  Evaluation result;
  result.trials = mc.trials;
  for (std::size_t i = 0; i < k; ++i) {
    const BeamMethod m = config.methods[i];
    MethodEvaluation me{m, {}, 0.0, {}};
    std::vector<double> values = acc.sinr[i];
    simcore::MeanAccumulator stats;
    for (double v : values) stats.add(v);
    const double half = kZ95 * stats.standard_error();
    std::sort(values.begin(), values.end());
    me.sinr = {stats.mean(),
               stats.mean() - half,
               stats.mean() + half,
               percentile(values, 0.05),
               percentile(values, 0.25),
               percentile(values, 0.50),
               percentile(values, 0.75),
               percentile(values, 0.95)};
    double per_sum = 0.0;
    for (double p : acc.per[i]) per_sum += p;
    me.mean_packet_error = per_sum / static_cast<double>(acc.per[i].size());
    me.per_by_slot.resize(config.slots);
    for (std::size_t t = 1; t <= config.slots; ++t) {
      me.per_by_slot[t - 1] = std::pow(me.mean_packet_error, static_cast<double>(config.opportunities(m, t)));
    }
    result.methods.push_back(std::move(me));
  }
  return result;
}

}  // namespace urllc::mimo
