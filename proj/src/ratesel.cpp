// SPDX-License-Identifier: Apache-2.0

#include "urllc/ratesel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "urllc/simcore/numerics.hpp"

namespace urllc::ratesel {
namespace {

constexpr std::uint64_t kThroughputTag = 0x7A;
constexpr std::uint64_t kOutageTag = 0x7B;
// Above this many samples the sample mean is drawn as Gamma(n, theta/n), which
// has exactly the distribution of the mean of n exponentials.
constexpr std::uint64_t kExplicitSampleLimit = 1024;
constexpr double kPcrLowerBracket = 1e-15;
constexpr double kZ95 = 1.959963984540054;

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
}

void check_n(std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (n > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) throw std::invalid_argument("n too large");
}

double draw_estimate(simcore::SeededStream& rng, double theta, std::uint64_t n) {
  if (n > kExplicitSampleLimit) return rng.gamma(static_cast<double>(n), theta / static_cast<double>(n));
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) sum += rng.exponential(theta);
  return sum / static_cast<double>(n);
}

}  // namespace

void RayleighScenario::validate() const {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta must be positive");
  check_eps(eps);
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("xi must lie in (0, 1)");
  check_n(n);
}

std::string_view to_string(Constraint c) { return c == Constraint::average_reliability ? "ar" : "pcr"; }

Constraint parse_constraint(std::string_view s) {
  if (s == "ar") return Constraint::average_reliability;
  if (s == "pcr") return Constraint::probably_correct;
  throw std::invalid_argument("unknown constraint '" + std::string(s) + "'");
}

double outage_probability(double theta, double rate) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (!(rate >= 0.0)) throw std::invalid_argument("rate must be >= 0");
  const double threshold = std::expm1(rate * std::numbers::ln2);  // 2^R - 1
  return -std::expm1(-threshold / theta);
}

double outage_capacity(double theta, double eps) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  check_eps(eps);
  return std::log1p(-theta * std::log1p(-eps)) / std::numbers::ln2;
}

double ml_estimate(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("empty sample set");
  double sum = 0.0;
  for (double x : samples) {
    if (!(x >= 0.0)) throw std::invalid_argument("power samples must be non-negative");
    sum += x;
  }
  return sum / static_cast<double>(samples.size());
}

double ar_epsilon(std::uint64_t n, double eps) {
  check_n(n);
  check_eps(eps);
  const double nd = static_cast<double>(n);
  // (1 - eps)^(-1/n) - 1
  const double growth = std::expm1(-std::log1p(-eps) / nd);
  return -std::expm1(-nd * growth);
}

double ar_mean_outage(std::uint64_t n, double eps_n) {
  check_n(n);
  check_eps(eps_n);
  const double nd = static_cast<double>(n);
  return -std::expm1(-nd * std::log1p(-std::log1p(-eps_n) / nd));
}

double pcr_violation(std::uint64_t n, double eps, double eps_n) {
  check_n(n);
  check_eps(eps);
  check_eps(eps_n);
  const double nd = static_cast<double>(n);
  const double x = nd * std::log1p(-eps) / std::log1p(-eps_n);
  return simcore::reg_upper_gamma(static_cast<int>(n), x);
}

double pcr_epsilon(std::uint64_t n, double eps, double xi) {
  check_n(n);
  check_eps(eps);
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("xi must lie in (0, 1)");
  auto excess = [&](double e) { return pcr_violation(n, eps, e) - xi; };
  if (excess(eps) <= 0.0) return eps;
  const double lo = std::min(kPcrLowerBracket, 0.5 * eps);
  if (excess(lo) > 0.0) throw NoFeasibleBackoffError("no feasible back-off meets the PCR tolerance");
  const double tol = eps * 1e-14;
  const double root = simcore::bisect(excess, lo, eps, tol);
  // The violation grows with eps_n, so stepping down one tolerance stays feasible.
  return excess(root) <= 0.0 ? root : std::max(lo, root - tol);
}

double backoff_epsilon(const RayleighScenario& s, Constraint c) {
  s.validate();
  return c == Constraint::average_reliability ? ar_epsilon(s.n, s.eps) : pcr_epsilon(s.n, s.eps, s.xi);
}

double selected_rate(double theta_estimate, double eps_n) {
  if (theta_estimate <= 0.0) return 0.0;
  return outage_capacity(theta_estimate, eps_n);
}

ThroughputEstimate throughput_ratio(const RayleighScenario& s, Constraint c, const simcore::MonteCarloConfig& mc) {
  const double eps_n = backoff_epsilon(s, c);
  auto acc = simcore::run_trials<simcore::MeanAccumulator>(
      mc, kThroughputTag, [&](simcore::SeededStream& rng, simcore::MeanAccumulator& out) {
        const double estimate = draw_estimate(rng, s.theta, s.n);
        const double rate = selected_rate(estimate, eps_n);
        const double test_power = rng.exponential(s.theta);
        const double supported = std::log1p(test_power) / std::numbers::ln2;
        out.add(rate <= supported ? rate : 0.0);
      });
  const double optimum = outage_capacity(s.theta, s.eps) * (1.0 - s.eps);
  const double half = kZ95 * acc.standard_error();
  return {acc.mean() / optimum, (acc.mean() - half) / optimum, (acc.mean() + half) / optimum, acc.count};
}

OutageStatistics outage_statistics(const RayleighScenario& s, Constraint c, const simcore::MonteCarloConfig& mc) {
  const double eps_n = backoff_epsilon(s, c);
  struct Acc {
    simcore::MeanAccumulator outage;
    simcore::CountAccumulator violations;
    void merge(const Acc& o) {
      outage.merge(o.outage);
      violations.merge(o.violations);
    }
  };
  auto acc = simcore::run_trials<Acc>(mc, kOutageTag, [&](simcore::SeededStream& rng, Acc& out) {
    const double estimate = draw_estimate(rng, s.theta, s.n);
    const double f = outage_probability(s.theta, selected_rate(estimate, eps_n));
    out.outage.add(f);
    out.violations.add(f > s.eps);
  });
  return {acc.outage.mean(), acc.outage.standard_error(), acc.violations.fraction(), acc.outage.count};
}

}  // namespace urllc::ratesel
