// SPDX-License-Identifier: Apache-2.0
//
// Error calculus of the access procedures and latency CDFs of bounded
// retransmission.

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace urllc::access {

enum class Scheme { static_allocation, four_step, three_step, grant_free };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view s);

/// Per-step error probabilities. A scheme ignores the steps it does not run.
struct AccessErrorProfile {
  double sync = 0.0;     ///< initial or absolute time synchronization
  double request = 0.0;  ///< transmission request received by the BS
  double grant = 0.0;    ///< access grant received by the device
  double data = 0.0;
  double ack = 0.0;

  void validate() const;
};

/// 1 - prod(1 - eps_i) over the steps of `scheme`:
///   static_allocation, grant_free: sync, data, ack
///   three_step:                    sync, grant, data, ack
///   four_step:                     sync, request, grant, data, ack
double scheme_error(Scheme scheme, const AccessErrorProfile& profile);

struct RetransmissionModel {
  double success_prob = 0.9;     ///< per attempt
  double attempt_latency_s = 1e-3;
  std::uint32_t max_attempts = 1;

  void validate() const;
};

/// Step CDF of the delivery latency under i.i.d. attempts. The CDF saturates
/// at 1 - residual_loss() instead of 1.
class LatencyCdf {
 public:
  struct Step {
    double latency_s;
    double height;      ///< p (1-p)^(k-1)
    double cumulative;  ///< 1 - (1-p)^k
  };

  explicit LatencyCdf(const RetransmissionModel& model);

  const std::vector<Step>& steps() const { return steps_; }
  /// Probability of delivery within `deadline_s`; a deadline on a step
  /// includes that step.
  double reliability_at(double deadline_s) const;
  /// Probability the packet is never delivered, (1-p)^max_attempts.
  double residual_loss() const { return residual_loss_; }
  double asymptote() const { return 1.0 - residual_loss_; }

 private:
  std::vector<Step> steps_;
  double residual_loss_;
};

LatencyCdf latency_cdf(const RetransmissionModel& model);

}  // namespace urllc::access
