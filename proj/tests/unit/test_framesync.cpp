// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "urllc/framesync.hpp"

using namespace urllc::framesync;

TEST_CASE("marker construction") {
  CHECK(Marker::from_string("1011").to_string() == "1011");
  CHECK(Marker::alternating(5).to_string() == "10101");
  CHECK(Marker::from_integer(0b1101, 4).to_string() == "1101");
  CHECK_THROWS(Marker::from_string("10x1"));
  CHECK_THROWS(Marker::from_string(""));
}

TEST_CASE("small distributions") {
  const auto empty = occurrence_distribution(Marker::from_string("10"), 0);
  REQUIRE(empty.probs.size() >= 1);
  CHECK(empty.probs[0] == 1.0);
  CHECK(p_ub(empty) == 1.0);

  const auto d = occurrence_distribution(Marker::from_string("10"), 2);
  CHECK(d.probs[0] == 0.75);
  CHECK(d.probs[1] == 0.25);
  CHECK(d.total() == doctest::Approx(1.0));
  CHECK(p_ub(d) == 0.875);
  CHECK(p_ub_deficit(d) == 0.125);
  CHECK(p_ub_list(d, 1) == p_ub(d));
  CHECK(p_ub_list(d, 2) == 1.0);
}

TEST_CASE("distribution matches enumeration for short markers") {
  for (std::size_t m = 1; m <= 6; ++m) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << m); ++v) {
      const Marker marker = Marker::from_integer(v, m);
      for (std::size_t payload : {std::size_t{1}, std::size_t{5}, std::size_t{10}}) {
        const auto counts = oracle::enumerate_occurrences(marker.bits(), payload);
        const auto dist = occurrence_distribution(marker, payload);
        const double total = std::ldexp(1.0, static_cast<int>(payload));
        for (std::size_t i = 0; i < counts.size(); ++i) {
          const double got = i < dist.probs.size() ? dist.probs[i] : 0.0;
          CHECK(std::abs(got - static_cast<double>(counts[i]) / total) <= 1e-12);
        }
        CHECK(dist.tail_mass == 0.0);
      }
    }
  }
}

TEST_CASE("count cap") {
  const Marker zero = Marker::from_string("0");
  const auto lumped = occurrence_distribution(zero, 40, {4, true});
  CHECK(lumped.probs.size() == 5);
  CHECK(lumped.tail_mass > 0.99);
  CHECK(lumped.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(occurrence_distribution(zero, 40, {4, false}), CapExceededError);
  // No mass above the cap means no error even though offsets exceed it.
  CHECK_NOTHROW(occurrence_distribution(Marker::from_string("10"), 9, {4, false}));
}

TEST_CASE("list bound") {
  const auto d = occurrence_distribution(Marker::from_string("110"), 30);
  double prev = 0.0;
  for (std::size_t l = 1; l <= d.max_count() + 1; ++l) {
    const double v = p_ub_list(d, l);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(p_ub_list(d, d.max_count() + 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p_ub_deficit(d) == doctest::Approx(1.0 - p_ub(d)).epsilon(1e-10));
}

TEST_CASE("marker search") {
  // Alternating wins only for very short payloads; runs take over beyond that.
  for (std::size_t payload : {2u, 3u}) {
    const Marker two = search_marker(2, payload);
    CHECK((two.to_string() == "01" || two.to_string() == "10"));
  }
  CHECK(p_ub(occurrence_distribution(search_marker(2, 20), 20)) ==
        p_ub(occurrence_distribution(Marker::from_string("00"), 20)));
  // Exhaustive search really attains the maximum.
  const Marker five = search_marker(5, 20);
  const double best = p_ub(occurrence_distribution(five, 20));
  for (std::uint64_t v = 0; v < 32; ++v) {
    CHECK(p_ub(occurrence_distribution(Marker::from_integer(v, 5), 20)) <= best);
  }
  // The hill climb never does worse than the alternating floor.
  SearchOptions opt;
  opt.exhaustive_limit = 4;
  opt.budget = 50;
  const Marker climbed = search_marker(12, 64, opt);
  CHECK(p_ub(occurrence_distribution(climbed, 64)) >= p_ub(occurrence_distribution(Marker::alternating(12), 64)));
  CHECK(search_marker(12, 64, opt) == climbed);
}

TEST_CASE("noiseless synchronizer reaches the bound") {
  const Marker m = Marker::from_string("10");
  const auto est = simulate_sync(m, 2, std::nullopt, {1000000, 1, 1});
  CHECK(std::abs(est.probability - 0.875) <= 4.0 * std::sqrt(0.875 * 0.125 / 1e6));
  const auto noisy = simulate_sync(m, 2, -20.0, {100000, 1, 1});
  const auto clean = simulate_sync(m, 2, std::nullopt, {100000, 1, 1});
  CHECK(noisy.probability < clean.probability);
  CHECK(simulate_sync(m, 2, std::nullopt, {20000, 4, 3}).probability ==
        simulate_sync(m, 2, std::nullopt, {20000, 4, 1}).probability);
}
