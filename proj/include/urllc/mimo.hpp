// SPDX-License-Identifier: Apache-2.0
//
// Covariance-based zero-forcing beamforming for two terminals served by one
// large array.
//
// Channels are sums of rank-one path contributions with Rayleigh amplitudes
// and fixed directions. The transmitter nulls the other terminal by projecting
// onto the orthogonal complement of its transmit covariance support, then
// combines the own-terminal singular vectors with a method-specific weight.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "urllc/simcore/monte_carlo.hpp"

namespace urllc::mimo {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr std::size_t kTerminals = 2;

struct PathSpec {
  double departure_rad = 0.0;  ///< angle from array broadside at the BS
  double arrival_rad = 0.0;    ///< angle at the terminal array
  double power = 1.0;          ///< mean |alpha|^2
};

struct ClusterChannelSpec {
  std::size_t bs_antennas = 100;       ///< M
  std::size_t terminal_antennas = 1;   ///< N
  std::array<std::vector<PathSpec>, kTerminals> paths;

  void validate() const;
  double total_power(std::size_t terminal) const;
};

/// Unit-norm half-wavelength ULA response, entries exp(j pi m sin(angle)) / sqrt(n).
CVector steering_vector(std::size_t n, double angle_rad);

/// Knobs used to generate a ClusterChannelSpec. Angles are in degrees.
struct ScenarioParams {
  std::size_t bs_antennas = 100;
  std::size_t terminal_antennas = 1;
  std::size_t paths_per_terminal = 10;
  std::array<double, kTerminals> cluster_center_deg{-4.0, 4.0};
  double cluster_spread_deg = 10.0;    ///< departure angles uniform in center +- spread/2
  double arrival_spread_deg = 120.0;   ///< arrival angles uniform in +- spread/2
  double power_span_db = 20.0;         ///< strongest over weakest path power
  double path_gain_total = 200.0;      ///< sum of path powers per terminal
  std::uint64_t geometry_seed = 1;     ///< path angles are long-term, so they get their own seed

  void validate() const;
};

/// Draws path angles from a stream keyed by geometry_seed. Powers decay
/// geometrically from the first path to the last.
ClusterChannelSpec make_cluster_spec(const ScenarioParams& params);

struct ChannelRealization {
  std::array<CMatrix, kTerminals> H;  ///< N x M per terminal
};

ChannelRealization draw_channel(const ClusterChannelSpec& spec, simcore::SeededStream& stream);

/// draw_channel with the steering vectors computed once.
class ChannelSampler {
 public:
  explicit ChannelSampler(const ClusterChannelSpec& spec);
  ChannelRealization draw(simcore::SeededStream& stream) const;

 private:
  struct Path {
    CVector rx;
    CVector tx_conj;  ///< s_tx^H stored as a column
    double power;
  };
  std::size_t bs_antennas_;
  std::size_t terminal_antennas_;
  std::array<std::vector<Path>, kTerminals> paths_;
};

struct CovariancePair {
  CMatrix R_tx;            ///< M x M
  CMatrix R_rx;            ///< N x N
  CMatrix V;               ///< eigenvectors of R_tx, eigenvalues nonincreasing
  Eigen::VectorXd lambda;  ///< eigenvalues of R_tx
  CMatrix U;               ///< eigenvectors of R_rx
  Eigen::VectorXd lambda_rx;
  std::size_t rank = 0;    ///< number of eigenvalues of R_tx above the noise floor

  CVector v_max() const { return V.col(0); }
  CVector u_max() const { return U.col(0); }
  /// First `rank` columns of V.
  CMatrix signal_subspace() const { return V.leftCols(static_cast<Eigen::Index>(rank)); }
};

CovariancePair covariance(const ClusterChannelSpec& spec, std::size_t terminal);

enum class BeamMethod { interference_free, all_sv_coh, strongest_sv_inst, all_sv_ncoh, strongest_sv_av };

inline constexpr std::array<BeamMethod, 5> kAllMethods{BeamMethod::interference_free, BeamMethod::all_sv_coh,
                                                       BeamMethod::strongest_sv_inst, BeamMethod::all_sv_ncoh,
                                                       BeamMethod::strongest_sv_av};

std::string_view to_string(BeamMethod m);
BeamMethod parse_method(std::string_view s);
bool requires_csi(BeamMethod m);
bool is_zero_forcing(BeamMethod m);
/// True when the receiver matches the aggregate channel H F.
bool uses_aggregate_receiver(BeamMethod m);

enum class Multiplexing { space, time };

std::string_view to_string(Multiplexing m);
Multiplexing parse_multiplexing(std::string_view s);

class MissingCsiError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PrecoderOptions {
  Multiplexing multiplexing = Multiplexing::space;
  double total_power = 1.0;
  /// Variance of complex Gaussian noise added to the channel projections the
  /// transmitter estimates for strongest_sv_inst. Needs a stream when > 0.
  double estimation_noise_var = 0.0;
};

/// Caches the long-term quantities (projections, subspace bases) so that
/// per-realization precoders only cost a few small products.
class Beamformer {
 public:
  Beamformer(const std::array<CovariancePair, kTerminals>& covs, const PrecoderOptions& options);

  /// Precoder for `terminal`, one column per stream, scaled so the squared
  /// Frobenius norm is total_power / users. Only all_sv_ncoh has several
  /// columns; they carry the same symbol with orthogonal signaling.
  CMatrix precoder(BeamMethod method, std::size_t terminal, const ChannelRealization* csi,
                   simcore::SeededStream* stream = nullptr) const;
  /// Receive filters of `terminal`, one column per precoder column.
  CMatrix receiver(BeamMethod method, std::size_t terminal, const CMatrix& H, const CMatrix& F) const;

  double per_user_power() const { return per_user_power_; }
  const CMatrix& projection(std::size_t terminal) const { return terms_[terminal].projection; }

 private:
  struct Terms {
    CMatrix projection;       ///< orthogonal projector away from the other terminal (identity without ZF)
    CMatrix projected_svs;    ///< projection * signal subspace
    CMatrix coherent_basis;   ///< orthonormal basis of span(projected_svs)
    CMatrix noncoherent;      ///< projection * V * Lambda^(1/2)
    CVector strongest;        ///< projection * v_max
    CVector u_max;
  };
  std::array<Terms, kTerminals> terms_;
  PrecoderOptions options_;
  double per_user_power_;
};

/// One-shot convenience wrapper around Beamformer.
CMatrix build_precoder(BeamMethod method, std::size_t terminal, const std::array<CovariancePair, kTerminals>& covs,
                       const ChannelRealization* csi, const PrecoderOptions& options = {});

/// Post-combining SINR of orthogonally signaled streams:
/// |sum_i g_i^H H f_i|^2 / (sum_ij |g_i^H H fint_j|^2 + noise_var sum_i |g_i|^2).
/// For single columns this is |g^H H f|^2 / (|g^H H f_int|^2 + noise_var |g|^2).
/// Pass an empty F_int to drop the interference term.
double sinr(const CMatrix& H, const CMatrix& F, const CMatrix& F_int, const CMatrix& G, double noise_var);

/// 1 - (1 - Q(sqrt(2 sinr)))^payload_bits, uncoded BPSK.
double packet_error(double sinr, std::size_t payload_bits);

struct EvaluationConfig {
  std::vector<BeamMethod> methods{kAllMethods.begin(), kAllMethods.end()};
  double rho_db = 0.0;  ///< total transmit power over noise variance
  Multiplexing multiplexing = Multiplexing::space;
  std::size_t payload_bits = 100;
  std::size_t slots = 10;
  double total_power = 1.0;
  std::size_t coherent_packets_per_slot = 1;     ///< interference_free, all_sv_coh
  std::size_t noncoherent_packets_per_slot = 2;  ///< the other methods
  double estimation_noise_var = 0.0;

  void validate() const;
  std::size_t packets_per_slot(BeamMethod m) const;
  /// Delivery opportunities of terminal 1 after `slot` slots (1-based).
  std::size_t opportunities(BeamMethod m, std::size_t slot) const;
};

struct SinrSummary {
  double mean = 0.0;
  double ci_lo = 0.0;  ///< 95% normal interval on the mean
  double ci_hi = 0.0;
  double p05 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p95 = 0.0;
};

struct MethodEvaluation {
  BeamMethod method;
  SinrSummary sinr;               ///< linear SINR of terminal 1
  double mean_packet_error = 0.0; ///< averaged over realizations
  std::vector<double> per_by_slot;///< entry t-1 is the residual loss after t slots
};

struct Evaluation {
  std::vector<MethodEvaluation> methods;
  std::uint64_t trials = 0;
};

Evaluation evaluate(const ClusterChannelSpec& spec, const EvaluationConfig& config, const simcore::MonteCarloConfig& mc);

}  // namespace urllc::mimo
