// SPDX-License-Identifier: Apache-2.0

#include "urllc/simcore/numerics.hpp"

#include <limits>
#include <numbers>

namespace urllc::simcore {
namespace {

// Beyond this point 0.5*erfc(x/sqrt2) drops under 1e-300 and loses digits.
constexpr double kErfcLimit = 37.0;

// Laplace continued fraction x + 1/(x + 2/(x + 3/(x + ...))), so that
// Q(x) = phi(x) / cf(x). Converges fast for the large x it is used on.
double tail_continued_fraction(double x) {
  double acc = x;
  for (int k = 60; k >= 1; --k) acc = x + k / acc;
  return acc;
}

double log_gamma_prefactor(int n, double x) {
  // log(x^n e^-x / Gamma(n))
  return n * std::log(x) - x - std::lgamma(static_cast<double>(n));
}

// Power series for P(n, x), used for x < n + 1.
double lower_series(int n, double x) {
  double term = 1.0 / n;
  double sum = term;
  for (int k = 1; k < 10000; ++k) {
    term *= x / (n + k);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
  }
  return sum * std::exp(log_gamma_prefactor(n, x));
}

// Modified Lentz evaluation of the continued fraction for Q(n, x), x >= n + 1.
double upper_fraction(int n, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - n;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (i - n);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(log_gamma_prefactor(n, x)) * h;
}

void check_gamma_args(int n, double x) {
  if (n < 1) throw std::invalid_argument("incomplete gamma: n must be >= 1");
  if (!(x >= 0.0)) throw std::invalid_argument("incomplete gamma: x must be >= 0");
}

}  // namespace

double q_function(double x) {
  if (x < kErfcLimit) return 0.5 * std::erfc(x / std::numbers::sqrt2);
  return std::exp(log_q_function(x));
}

double log_q_function(double x) {
  if (x < kErfcLimit) return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
  const double log_phi = -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
  return log_phi - std::log(tail_continued_fraction(x));
}

double reg_lower_gamma(int n, double x) {
  check_gamma_args(n, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < n + 1.0) return lower_series(n, x);
  return 1.0 - upper_fraction(n, x);
}

double reg_upper_gamma(int n, double x) {
  check_gamma_args(n, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < n + 1.0) return 1.0 - lower_series(n, x);
  return upper_fraction(n, x);
}

}  // namespace urllc::simcore
