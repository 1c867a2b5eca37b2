// SPDX-License-Identifier: Apache-2.0

#include "urllc/access.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace urllc::access {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

double failure_of_chain(std::initializer_list<double> step_errors) {
  double log_success = 0.0;
  for (double e : step_errors) log_success += std::log1p(-e);
  return -std::expm1(log_success);
}

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::static_allocation: return "static";
    case Scheme::four_step: return "four_step";
    case Scheme::three_step: return "three_step";
    case Scheme::grant_free: return "grant_free";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "static") return Scheme::static_allocation;
  if (s == "four_step") return Scheme::four_step;
  if (s == "three_step") return Scheme::three_step;
  if (s == "grant_free") return Scheme::grant_free;
  throw std::invalid_argument("unknown access scheme '" + std::string(s) + "'");
}

void AccessErrorProfile::validate() const {
  for (double p : {sync, request, grant, data, ack}) {
    if (!is_probability(p)) throw std::invalid_argument("access error probabilities must lie in [0, 1]");
  }
}

double scheme_error(Scheme scheme, const AccessErrorProfile& p) {
  p.validate();
  switch (scheme) {
    case Scheme::static_allocation:
    case Scheme::grant_free:
      return failure_of_chain({p.sync, p.data, p.ack});
    case Scheme::three_step:
      return failure_of_chain({p.sync, p.grant, p.data, p.ack});
    case Scheme::four_step:
      return failure_of_chain({p.sync, p.request, p.grant, p.data, p.ack});
  }
  throw std::invalid_argument("unknown access scheme");
}

void RetransmissionModel::validate() const {
  if (!is_probability(success_prob)) throw std::invalid_argument("per-attempt success must lie in [0, 1]");
  if (!(attempt_latency_s > 0.0) || !std::isfinite(attempt_latency_s)) {
    throw std::invalid_argument("attempt latency must be positive");
  }
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
}

LatencyCdf::LatencyCdf(const RetransmissionModel& model) {
  model.validate();
  const double p = model.success_prob;
  const double q = 1.0 - p;
  steps_.reserve(model.max_attempts);
  double miss = 1.0;  // (1-p)^(k-1)
  for (std::uint32_t k = 1; k <= model.max_attempts; ++k) {
    const double height = p * miss;
    miss *= q;
    steps_.push_back({static_cast<double>(k) * model.attempt_latency_s, height, 1.0 - miss});
  }
  residual_loss_ = miss;
}

double LatencyCdf::reliability_at(double deadline_s) const {
  auto after = std::upper_bound(steps_.begin(), steps_.end(), deadline_s,
                                [](double d, const Step& s) { return d < s.latency_s; });
  if (after == steps_.begin()) return 0.0;
  return std::prev(after)->cumulative;
}

LatencyCdf latency_cdf(const RetransmissionModel& model) { return LatencyCdf(model); }

}  // namespace urllc::access
