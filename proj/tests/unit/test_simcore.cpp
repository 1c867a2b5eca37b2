// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "urllc/simcore/monte_carlo.hpp"
#include "urllc/simcore/numerics.hpp"
#include "urllc/simcore/random.hpp"

using namespace urllc::simcore;

namespace {

// Composite Simpson on [x, x + 12] of the standard normal density.
double gaussian_tail_quadrature(double x) {
  const int n = 200000;
  const double a = x, b = x + 12.0, h = (b - a) / n;
  auto phi = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
  double s = phi(a) + phi(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * phi(a + i * h);
  return s * h / 3.0;
}

double poisson_lower_gamma(int n, double x) {
  double term = std::exp(-x), sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += term;
    term *= x / (k + 1);
  }
  return 1.0 - sum;
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  SeededStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    firsts.insert(x);
  }
  CHECK(firsts.size() == 100);
  CHECK(SeededStream(7, 3)() != c());
  CHECK(SeededStream(7, 3)() != d());
}

TEST_CASE("stream distributions have the right moments") {
  SeededStream s(1, 0);
  const int n = 200000;
  MeanAccumulator u, z, e, g;
  for (int i = 0; i < n; ++i) {
    const double x = s.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    u.add(x);
    z.add(s.normal());
    e.add(s.exponential(3.0));
    g.add(s.gamma(2.5, 2.0));
  }
  CHECK(std::abs(u.mean() - 0.5) < 5 * u.standard_error());
  CHECK(std::abs(z.mean()) < 5 * z.standard_error());
  CHECK(std::abs(z.variance() - 1.0) < 0.02);
  CHECK(std::abs(e.mean() - 3.0) < 5 * e.standard_error());
  CHECK(std::abs(g.mean() - 5.0) < 5 * g.standard_error());
  CHECK(std::abs(g.variance() - 10.0) < 0.3);

  std::array<int, 5> hist{};
  for (int i = 0; i < 50000; ++i) ++hist[s.below(5)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);

  MeanAccumulator cn;
  for (int i = 0; i < 50000; ++i) cn.add(std::norm(s.complex_normal(2.0)));
  CHECK(std::abs(cn.mean() - 2.0) < 5 * cn.standard_error());
}

TEST_CASE("q function") {
  CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(q_function(3.0) - 1.3499e-3) < 1e-7);
  CHECK(std::abs(q_function(3.0) - gaussian_tail_quadrature(3.0)) < 1e-12);
  CHECK(std::abs(q_function(1.234) - gaussian_tail_quadrature(1.234)) < 1e-12);
  const double q38 = q_function(38.0);
  CHECK(q38 > 0.0);
  CHECK(q38 < 1e-300);
  // Asymptotic series phi(x)/x (1 - 1/x^2 + 3/x^4).
  const double x = 38.0;
  const double log_asym = -0.5 * x * x - std::log(x * std::sqrt(2.0 * std::numbers::pi)) +
                          std::log(1.0 - 1.0 / (x * x) + 3.0 / std::pow(x, 4));
  CHECK(log_q_function(38.0) == doctest::Approx(log_asym).epsilon(1e-10));
  double prev = 1.0;
  for (double t = -10.0; t <= 10.0; t += 0.01) {
    const double q = q_function(t);
    CHECK(std::abs(q + q_function(-t) - 1.0) < 1e-12);
    if (t > -5.0) CHECK(q < prev);
    prev = q;
  }
}

TEST_CASE("regularized incomplete gamma") {
  CHECK(reg_lower_gamma(1, 0.7) == doctest::Approx(1.0 - std::exp(-0.7)).epsilon(1e-14));
  CHECK(reg_lower_gamma(5, 0.0) == 0.0);
  CHECK(std::abs(reg_lower_gamma(2, 2.0) - (1.0 - 3.0 * std::exp(-2.0))) < 1e-9);
  for (int n = 1; n <= 50; ++n) {
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0}) {
      CHECK(std::abs(reg_lower_gamma(n, x) - poisson_lower_gamma(n, x)) < 1e-10);
      CHECK(std::abs(reg_lower_gamma(n, x) + reg_upper_gamma(n, x) - 1.0) < 1e-13);
    }
  }
  // Upper tail without cancellation: Q(1, x) = e^-x.
  CHECK(reg_upper_gamma(1, 50.0) == doctest::Approx(std::exp(-50.0)).epsilon(1e-12));
}

TEST_CASE("bisection") {
  CHECK(std::abs(bisect([](double x) { return x - 1.0; }, 0.0, 2.0, 1e-9) - 1.0) < 1e-9);
  CHECK(std::abs(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-9) - std::sqrt(2.0)) < 1e-8);
  CHECK_THROWS_AS(bisect([](double x) { return x + 1.0; }, 0.0, 2.0, 1e-9), NoBracketError);
  CHECK_THROWS(bisect([](double x) { return x; }, 0.0, 2.0, 0.0));
}

TEST_CASE("run_trials is independent of the worker count") {
  auto trial = [](SeededStream& s, MeanAccumulator& acc) { acc.add(s.exponential(1.0)); };
  const auto one = run_trials<MeanAccumulator>({10000, 5, 1}, 0x11, trial);
  const auto three = run_trials<MeanAccumulator>({10000, 5, 3}, 0x11, trial);
  const auto again = run_trials<MeanAccumulator>({10000, 5, 1}, 0x11, trial);
  CHECK(one.count == 10000);
  CHECK(one.sum == three.sum);
  CHECK(one.sum_sq == three.sum_sq);
  CHECK(one.sum == again.sum);
  const auto other = run_trials<MeanAccumulator>({10000, 6, 1}, 0x11, trial);
  CHECK(one.sum != other.sum);
  CHECK_THROWS(run_trials<MeanAccumulator>({0, 5, 1}, 0x11, trial));
}

TEST_CASE("run_trials propagates exceptions from workers") {
  auto trial = [](SeededStream& s, CountAccumulator& acc) {
    if (s.substream_id() == trial_substream(0x12, 5000)) throw std::runtime_error("boom");
    acc.add(true);
  };
  CHECK_THROWS_AS(run_trials<CountAccumulator>({9000, 1, 2}, 0x12, trial), std::runtime_error);
}
