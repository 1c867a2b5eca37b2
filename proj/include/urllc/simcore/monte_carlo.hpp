// SPDX-License-Identifier: Apache-2.0
//
// Deterministic Monte-Carlo fan-out.
//
// Trials are grouped into fixed-size chunks. Each chunk starts from a fresh
// accumulator and processes its trials in index order, each with its own
// SeededStream. Chunk results are then merged pairwise in chunk order. None of
// this depends on the number of workers, so results are bit-identical for any
// worker count.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "urllc/simcore/random.hpp"

namespace urllc::simcore {

struct MonteCarloConfig {
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 1;
  unsigned workers = 1;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("MonteCarloConfig: trials must be >= 1");
    if (workers < 1) throw std::invalid_argument("MonteCarloConfig: workers must be >= 1");
  }
};

inline constexpr std::uint64_t kTrialsPerChunk = 4096;

/// Substream ids are (tag << 40) | trial, so operations sharing a master seed
/// never reuse each other's streams.
inline std::uint64_t trial_substream(std::uint64_t tag, std::uint64_t trial) {
  return (tag << 40) | (trial & ((std::uint64_t{1} << 40) - 1));
}

/// Runs `trial(stream, acc)` for every trial and returns the merged accumulator.
/// `Acc` must be default-constructible and provide `void merge(const Acc&)`.
template <class Acc, class TrialFn>
Acc run_trials(const MonteCarloConfig& mc, std::uint64_t tag, TrialFn&& trial) {
  mc.validate();
  const std::uint64_t chunks = (mc.trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
  std::vector<Acc> partial(chunks);

  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t first = c * kTrialsPerChunk;
    const std::uint64_t last = std::min(mc.trials, first + kTrialsPerChunk);
    Acc acc{};
    for (std::uint64_t t = first; t < last; ++t) {
      SeededStream stream(mc.master_seed, trial_substream(tag, t));
      trial(stream, acc);
    }
    partial[c] = std::move(acc);
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(mc.workers, chunks));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) {
          try {
            run_chunk(c);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  // Pairwise merge in a fixed tree.
  for (std::size_t stride = 1; stride < partial.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < partial.size(); i += 2 * stride) {
      partial[i].merge(partial[i + stride]);
    }
  }
  return partial.empty() ? Acc{} : std::move(partial.front());
}

/// Running sum, sum of squares and count, for means with standard errors.
struct MeanAccumulator {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++count;
    sum += x;
    sum_sq += x * x;
  }
  void merge(const MeanAccumulator& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
  double variance() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    return std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
  }
  double standard_error() const { return count ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }
};

/// Counts successes out of trials.
struct CountAccumulator {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;

  void add(bool hit) {
    ++trials;
    hits += hit ? 1 : 0;
  }
  void merge(const CountAccumulator& o) {
    trials += o.trials;
    hits += o.hits;
  }
  double fraction() const { return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0; }
};

/// Standard error of a binomial proportion p estimated from n trials.
inline double binomial_sigma(double p, std::uint64_t n) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

}  // namespace urllc::simcore
