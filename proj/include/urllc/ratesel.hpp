// SPDX-License-Identifier: Apache-2.0
//
// Rate selection over a Rayleigh channel whose average power is learned from
// n noiseless power samples.
//
// The received power is exponential with mean theta. The transmitter plugs
// the sample mean into the eps_n-outage capacity, with eps_n backed off from
// the target eps so that either the average outage (AR) or the probability of
// exceeding eps (PCR, tolerance xi) is controlled for every theta.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>

#include "urllc/simcore/monte_carlo.hpp"

namespace urllc::ratesel {

struct RayleighScenario {
  double theta = 10.0;  ///< average channel power
  double eps = 1e-3;    ///< target outage probability
  double xi = 1e-2;     ///< PCR tolerance
  std::uint64_t n = 100;

  void validate() const;
};

enum class Constraint { average_reliability, probably_correct };

std::string_view to_string(Constraint c);
Constraint parse_constraint(std::string_view s);

/// Pr[rate > log2(1 + P)] for P ~ Exp(theta).
double outage_probability(double theta, double rate);

/// log2(1 - theta ln(1 - eps)), the largest rate with outage <= eps.
double outage_capacity(double theta, double eps);

/// Sample mean of received powers.
double ml_estimate(std::span<const double> samples);

/// Largest eps_n keeping the worst-case mean outage at eps.
double ar_epsilon(std::uint64_t n, double eps);

/// Worst-case mean outage when backing off to eps_n:
/// 1 - (1 - ln(1 - eps_n)/n)^(-n).
double ar_mean_outage(std::uint64_t n, double eps_n);

/// Worst-case probability that the realized outage exceeds eps when backing
/// off to eps_n: 1 - P(n, n ln(1-eps)/ln(1-eps_n)).
double pcr_violation(std::uint64_t n, double eps, double eps_n);

class NoFeasibleBackoffError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Largest eps_n in (0, eps] with pcr_violation(n, eps, eps_n) <= xi. Returns
/// eps itself when the constraint does not bind.
double pcr_epsilon(std::uint64_t n, double eps, double xi);

double backoff_epsilon(const RayleighScenario& s, Constraint c);

/// R(x^n) = R_{eps_n}(mean(x^n)).
double selected_rate(double theta_estimate, double eps_n);

struct ThroughputEstimate {
  double lambda = 0.0;
  double ci_lo = 0.0;  ///< 95% normal interval
  double ci_hi = 0.0;
  std::uint64_t trials = 0;
};

/// Monte-Carlo estimate of E[R 1{R <= log2(1+Y)}] / (R_eps(theta) (1 - eps)).
ThroughputEstimate throughput_ratio(const RayleighScenario& s, Constraint c, const simcore::MonteCarloConfig& mc);

struct OutageStatistics {
  double mean_outage = 0.0;         ///< mean of F(R(X^n))
  double mean_outage_sigma = 0.0;   ///< its standard error
  double violation_fraction = 0.0;  ///< fraction with F(R(X^n)) > eps
  std::uint64_t trials = 0;
};

/// Distribution of the realized outage F(R(X^n)) over training sets.
OutageStatistics outage_statistics(const RayleighScenario& s, Constraint c, const simcore::MonteCarloConfig& mc);

}  // namespace urllc::ratesel
