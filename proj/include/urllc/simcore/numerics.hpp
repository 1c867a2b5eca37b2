// SPDX-License-Identifier: Apache-2.0
//
// Shared special functions and root finding.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace urllc::simcore {

/// Absolute tolerance used when solving for probabilities.
inline constexpr double kProbabilityTolerance = 1e-12;
/// Relative tolerance used when solving for rates and bandwidths.
inline constexpr double kRelativeTolerance = 1e-9;

/// Gaussian tail Pr[Z > x] for standard normal Z.
///
/// Stays accurate deep into the upper tail: for x beyond the range where
/// erfc is representable the value is rebuilt from log_q_function, so the
/// result only reaches zero once it is below the smallest subnormal.
double q_function(double x);

/// Natural logarithm of q_function(x), finite for every finite x.
double log_q_function(double x);

/// Regularized lower incomplete gamma P(n, x) = gamma(n, x) / (n-1)!.
double reg_lower_gamma(int n, double x);

/// Complement Q(n, x) = 1 - P(n, x), computed without cancellation.
double reg_upper_gamma(int n, double x);

class NoBracketError : public std::invalid_argument {
 public:
  explicit NoBracketError(const std::string& what) : std::invalid_argument(what) {}
};

/// Bisection on a sign change of `f` over [lo, hi].
///
/// Returns the midpoint of the final interval, whose width is at most `tol`.
/// A zero at either endpoint is returned directly. Throws NoBracketError when
/// f(lo) and f(hi) are both strictly positive or both strictly negative.
template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisect: tol must be positive");
  if (lo > hi) throw std::invalid_argument("bisect: lo > hi");
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw NoBracketError("bisect: no bracket, f has the same sign at both endpoints");
  }
  // The iteration cap only matters when tol is below the spacing of doubles.
  for (int it = 0; it < 2000 && hi - lo > tol; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if (std::signbit(fmid) == std::signbit(flo)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace urllc::simcore
