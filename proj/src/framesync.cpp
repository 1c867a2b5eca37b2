// SPDX-License-Identifier: Apache-2.0

#include "urllc/framesync.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "urllc/simcore/random.hpp"

namespace urllc::framesync {
namespace {

constexpr std::uint64_t kSearchStreamTag = 0x5E;
constexpr std::uint64_t kSyncStreamTag = 0x5F;

// Transition table of the Knuth-Morris-Pratt automaton for `bits`. State s is
// the length of the longest marker prefix that is a suffix of the input read
// so far; state m means a full occurrence just ended.
std::vector<std::array<std::uint32_t, 2>> build_automaton(const std::vector<std::uint8_t>& bits) {
  const std::size_t m = bits.size();
  std::vector<std::size_t> border(m + 1, 0);  // border[k]: longest proper border of bits[0, k)
  for (std::size_t k = 2; k <= m; ++k) {
    std::size_t b = border[k - 1];
    while (b > 0 && bits[b] != bits[k - 1]) b = border[b];
    border[k] = bits[b] == bits[k - 1] ? b + 1 : 0;
  }
  std::vector<std::array<std::uint32_t, 2>> delta(m + 1);
  for (std::size_t s = 0; s <= m; ++s) {
    for (std::uint8_t bit = 0; bit < 2; ++bit) {
      std::size_t t = s;
      while (t > 0 && (t == m || bits[t] != bit)) t = border[t];
      delta[s][bit] = static_cast<std::uint32_t>((t < m && bits[t] == bit) ? t + 1 : 0);
    }
  }
  return delta;
}

// Reusable buffers for the (automaton state, count) recursion.
class OccurrenceEngine {
 public:
  explicit OccurrenceEngine(std::size_t count_cap) : cap_(count_cap), width_(count_cap + 1) {}

  // Runs the recursion; afterwards counts() and tail() hold the result.
  void run(const Marker& marker, std::size_t payload_bits) {
    const std::size_t m = marker.size();
    const auto delta = build_automaton(marker.bits());
    const std::size_t states = m + 1;
    cur_.assign(states * width_, 0.0);
    next_.assign(states * width_, 0.0);
    live_.assign(states, 0);
    next_live_.assign(states, 0);
    tail_ = 0.0;

    // The marker itself has just been read, so the automaton sits in state m.
    cur_[m * width_] = 1.0;
    live_[m] = 1;
    std::size_t hi = 0;  // largest count that can be nonzero so far

    for (std::size_t step = 0; step < payload_bits; ++step) {
      const std::size_t next_hi = std::min(cap_, hi + 1);
      std::fill(next_.begin(), next_.end(), 0.0);
      std::fill(next_live_.begin(), next_live_.end(), 0);
      for (std::size_t s = 0; s < states; ++s) {
        if (!live_[s]) continue;
        const double* src = cur_.data() + s * width_;
        for (std::uint8_t bit = 0; bit < 2; ++bit) {
          const std::size_t t = delta[s][bit];
          double* dst = next_.data() + t * width_;
          next_live_[t] = 1;
          if (t == m) {
            const std::size_t top = std::min(hi, cap_ - 1);
            for (std::size_t c = 0; c <= top; ++c) dst[c + 1] += 0.5 * src[c];
            if (hi == cap_) tail_ += 0.5 * src[cap_];
          } else {
            for (std::size_t c = 0; c <= hi; ++c) dst[c] += 0.5 * src[c];
          }
        }
      }
      std::swap(cur_, next_);
      std::swap(live_, next_live_);
      hi = next_hi;
    }

    counts_.assign(width_, 0.0);
    for (std::size_t s = 0; s < states; ++s) {
      if (!live_[s]) continue;
      for (std::size_t c = 0; c <= hi; ++c) counts_[c] += cur_[s * width_ + c];
    }
  }

  const std::vector<double>& counts() const { return counts_; }
  double tail() const { return tail_; }

 private:
  std::size_t cap_;
  std::size_t width_;
  std::vector<double> cur_, next_, counts_;
  std::vector<std::uint8_t> live_, next_live_;
  double tail_ = 0.0;
};

double deficit_of(const std::vector<double>& counts, double tail) {
  double deficit = tail;
  for (std::size_t i = 1; i < counts.size(); ++i) deficit += counts[i] * static_cast<double>(i) / (i + 1.0);
  return deficit;
}

}  // namespace

Marker::Marker(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) throw std::invalid_argument("marker must not be empty");
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("marker bits must be 0 or 1");
  }
}

Marker Marker::from_string(std::string_view s) {
  std::vector<std::uint8_t> bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("marker string must contain only '0' and '1'");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return Marker(std::move(bits));
}

Marker Marker::alternating(std::size_t length) {
  std::vector<std::uint8_t> bits(length);
  for (std::size_t i = 0; i < length; ++i) bits[i] = (i % 2 == 0) ? 1 : 0;
  return Marker(std::move(bits));
}

Marker Marker::from_integer(std::uint64_t value, std::size_t length) {
  if (length == 0 || length > 64) throw std::invalid_argument("marker length must be in [1, 64]");
  std::vector<std::uint8_t> bits(length);
  for (std::size_t i = 0; i < length; ++i) bits[i] = static_cast<std::uint8_t>((value >> (length - 1 - i)) & 1u);
  return Marker(std::move(bits));
}

std::string Marker::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
  return s;
}

double OccurrenceDistribution::total() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0) + tail_mass;
}

std::size_t OccurrenceDistribution::max_count() const {
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return 0;
}

OccurrenceDistribution occurrence_distribution(const Marker& marker, std::size_t payload_bits,
                                               const OccurrenceOptions& options) {
  if (marker.size() > kMaxMarkerLength) throw std::invalid_argument("marker longer than the supported maximum");
  if (options.count_cap < 1) throw std::invalid_argument("count cap must be >= 1");
  OccurrenceEngine engine(options.count_cap);
  engine.run(marker, payload_bits);
  OccurrenceDistribution dist{engine.counts(), engine.tail()};
  if (!options.lump_tail && dist.tail_mass > 0.0) {
    throw CapExceededError("occurrence count exceeds the cap of " + std::to_string(options.count_cap));
  }
  return dist;
}

double p_ub_list(const OccurrenceDistribution& dist, std::size_t list_size) {
  if (list_size < 1) throw std::invalid_argument("list size must be >= 1");
  double sum = 0.0;
  const double l = static_cast<double>(list_size);
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    sum += i < list_size ? dist.probs[i] : dist.probs[i] * l / (i + 1.0);
  }
  return sum;
}

double p_ub(const OccurrenceDistribution& dist) { return p_ub_list(dist, 1); }

double p_ub_deficit(const OccurrenceDistribution& dist) { return deficit_of(dist.probs, dist.tail_mass); }

Marker search_marker(std::size_t length, std::size_t payload_bits, const SearchOptions& options) {
  if (length < 2) throw std::invalid_argument("search_marker: length must be >= 2");
  if (length > kMaxMarkerLength) throw std::invalid_argument("search_marker: length exceeds the supported maximum");
  OccurrenceEngine engine(OccurrenceOptions{}.count_cap);
  auto deficit = [&](const Marker& m) {
    engine.run(m, payload_bits);
    return deficit_of(engine.counts(), engine.tail());
  };

  if (length <= options.exhaustive_limit) {
    // Complementing every bit leaves the distribution unchanged, so only
    // markers starting with 1 need to be scored.
    const std::uint64_t first = std::uint64_t{1} << (length - 1);
    const std::uint64_t last = std::uint64_t{1} << length;
    std::uint64_t best_value = first;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t v = first; v < last; ++v) {
      const double d = deficit(Marker::from_integer(v, length));
      if (d < best) {
        best = d;
        best_value = v;
      }
    }
    return Marker::from_integer(best_value, length);
  }

  simcore::SeededStream rng(options.seed, simcore::trial_substream(kSearchStreamTag, length));
  Marker best = Marker::alternating(length);
  double best_deficit = deficit(best);
  std::size_t evaluations = 1;
  bool first_climb = true;
  std::vector<std::size_t> order(length);

  while (evaluations < options.budget) {
    std::vector<std::uint8_t> bits(length);
    if (first_climb) {
      bits = best.bits();
    } else {
      for (auto& b : bits) b = rng.bit() ? 1 : 0;
    }
    first_climb = false;
    double current = deficit(Marker(bits));
    ++evaluations;

    bool improved = true;
    while (improved && evaluations < options.budget) {
      improved = false;
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = length; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
      for (std::size_t pos : order) {
        if (evaluations >= options.budget) break;
        bits[pos] ^= 1u;
        const double d = deficit(Marker(bits));
        ++evaluations;
        if (d < current) {
          current = d;
          improved = true;
        } else {
          bits[pos] ^= 1u;
        }
      }
    }
    if (current < best_deficit) {
      best_deficit = current;
      best = Marker(bits);
    }
  }
  return best;
}

namespace {

template <class Sample>
bool correct_lock(const std::vector<Sample>& received, const std::vector<int>& reference, std::size_t offsets,
                  simcore::SeededStream& rng) {
  const std::size_t m = reference.size();
  Sample best{};
  std::size_t ties = 0;
  bool zero_among_best = false;
  for (std::size_t j = 0; j < offsets; ++j) {
    Sample corr{};
    for (std::size_t i = 0; i < m; ++i) corr += static_cast<Sample>(reference[i]) * received[j + i];
    if (j == 0 || corr > best) {
      best = corr;
      ties = 1;
      zero_among_best = (j == 0);
    } else if (corr == best) {
      ++ties;
    }
  }
  if (!zero_among_best) return false;
  return ties == 1 || rng.below(ties) == 0;
}

}  // namespace

SyncEstimate simulate_sync(const Marker& marker, std::size_t payload_bits, std::optional<double> snr_db,
                           const simcore::MonteCarloConfig& mc) {
  const std::size_t m = marker.size();
  const std::size_t packet = m + payload_bits;
  const std::size_t offsets = payload_bits + 1;
  std::vector<int> reference(m);
  for (std::size_t i = 0; i < m; ++i) reference[i] = 1 - 2 * marker[i];
  const double sigma = snr_db ? std::pow(10.0, -*snr_db / 20.0) : 0.0;

  auto acc = simcore::run_trials<simcore::CountAccumulator>(
      mc, kSyncStreamTag, [&](simcore::SeededStream& rng, simcore::CountAccumulator& out) {
        if (!snr_db) {
          std::vector<int> rx(packet);
          for (std::size_t i = 0; i < m; ++i) rx[i] = reference[i];
          for (std::size_t i = m; i < packet; ++i) rx[i] = rng.bit() ? -1 : 1;
          out.add(correct_lock(rx, reference, offsets, rng));
        } else {
          std::vector<double> rx(packet);
          for (std::size_t i = 0; i < m; ++i) rx[i] = reference[i];
          for (std::size_t i = m; i < packet; ++i) rx[i] = rng.bit() ? -1.0 : 1.0;
          for (auto& r : rx) r += sigma * rng.normal();
          out.add(correct_lock(rx, reference, offsets, rng));
        }
      });
  const double p = acc.fraction();
  return {p, simcore::binomial_sigma(p, acc.trials), acc.trials};
}

}  // namespace urllc::framesync
