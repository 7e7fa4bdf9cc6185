#pragma once

// Special functions and series helpers shared by every other module:
// integer-order Bessel functions of the first kind, Poisson photon-number
// weights and the summation windows used to truncate Poisson averages.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>

#include "qlai/error.hpp"

namespace qlai {

inline constexpr int kBesselMaxOrder = 10000;
inline constexpr double kBesselMaxArgument = 1.0e4;

namespace detail {

// Power series sum_k (-1)^k (x/2)^(2k+n) / (k! (n+k)!). Only used where
// x^2 < 2(n+1), so the terms shrink from the first one on and cancellation
// costs at most a digit.
inline double bessel_j_series(int n, double x) {
  const double q = 0.25 * x * x;
  double term = (n == 0) ? 1.0 : std::exp(n * std::log(0.5 * x) - std::lgamma(n + 1.0));
  if (term == 0.0) return 0.0;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= -q / (static_cast<double>(k) * (n + k));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Miller's algorithm: recur J_{k-1} = (2k/x) J_k - J_{k+1} downward from an
// index well above max(n, x) and normalize with J_0 + 2 sum_k J_{2k} = 1.
inline double bessel_j_miller(int n, double x) {
  const double top = std::max(static_cast<double>(n), std::ceil(x));
  int start = static_cast<int>(top + 30.0 + std::sqrt(60.0 * top));
  if (start % 2 != 0) ++start;

  constexpr double kRescaleAbove = 1e200;
  constexpr double kRescaleBy = 1e-200;

  double above = 0.0;   // J_{k+1}
  double current = 1e-30;  // J_k, arbitrary scale
  double result = (start == n) ? current : 0.0;
  double norm = 0.0;
  const double two_over_x = 2.0 / x;
  for (int k = start; k >= 1; --k) {
    const double below = k * two_over_x * current - above;
    above = current;
    current = below;
    const int index = k - 1;
    if (index == n) result = current;
    if (index == 0) {
      norm += current;
    } else if (index % 2 == 0) {
      norm += 2.0 * current;
    }
    if (std::abs(current) > kRescaleAbove) {
      current *= kRescaleBy;
      above *= kRescaleBy;
      result *= kRescaleBy;
      norm *= kRescaleBy;
    }
  }
  return result / norm;
}

}  // namespace detail

/// Bessel function of the first kind J_order(x) for integer order.
///
/// Valid for |order| <= 1e4 and |x| <= 1e4; anything outside raises
/// ErrorKind::domain. Negative orders and arguments are folded onto the
/// non-negative quadrant with J_{-s}(x) = (-1)^s J_s(x) and
/// J_s(-x) = (-1)^s J_s(x), so those identities hold exactly.
inline double bessel_j(int order, double x) {
  if (!std::isfinite(x) || std::abs(x) > kBesselMaxArgument || std::abs(order) > kBesselMaxOrder) {
    throw Error(ErrorKind::domain, "bessel_j(" + std::to_string(order) + ", " + std::to_string(x) +
                                       ") outside |order| <= 1e4, |x| <= 1e4");
  }
  const int n = std::abs(order);
  const bool odd = (n % 2) != 0;
  double sign = 1.0;
  if (order < 0 && odd) sign = -sign;
  if (x < 0.0 && odd) sign = -sign;
  const double ax = std::abs(x);

  if (ax == 0.0) return n == 0 ? 1.0 : 0.0;
  if (ax * ax < 2.0 * (n + 1.0)) return sign * detail::bessel_j_series(n, ax);
  return sign * detail::bessel_j_miller(n, ax);
}

/// ln(n!) via log-gamma.
inline double log_factorial(std::uint64_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

namespace detail {

// ln(n!) - [(n + 1/2) ln n - n + ln sqrt(2 pi)], the Stirling remainder.
inline double stirling_error(double n) {
  if (n < 16.0) {
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double r = 1.0 / (n * n);
  return (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r / 1680.0))) / n;
}

// n ln(n / nbar) + nbar - n without the cancellation of the naive form.
inline double poisson_deviance(double n, double nbar) {
  const double d = (n - nbar) / nbar;
  if (std::abs(d) < 0.1) {
    // n ln(1+d) - nbar d = nbar [(1+d) ln(1+d) - d] = nbar sum_k (-1)^k d^k / (k (k-1)), k >= 2
    double term = d * d;
    double sum = 0.0;
    for (int k = 2; k < 60; ++k) {
      const double add = term / (k * (k - 1.0));
      sum += (k % 2 == 0) ? add : -add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
      term *= d;
    }
    return nbar * sum;
  }
  return n * std::log1p(d) - (n - nbar);
}

}  // namespace detail

/// ln W_n for the Poisson distribution with mean nbar. -inf when W_n = 0.
/// Uses the saddle-point form ln W_n = -ln sqrt(2 pi n) - stirling_error(n)
/// - deviance(n, nbar), accurate to a few ulp even for n, nbar ~ 1e6.
inline double log_poisson_weight(std::uint64_t n, double nbar) {
  if (nbar == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (n == 0) return -nbar;
  const double x = static_cast<double>(n);
  return -0.5 * std::log(2.0 * std::numbers::pi * x) - detail::stirling_error(x) - detail::poisson_deviance(x, nbar);
}

/// Poisson weight W_n = nbar^n e^{-nbar} / n!, evaluated in log space.
inline double poisson_weight(std::uint64_t n, double nbar) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw Error(ErrorKind::invalid_argument, "poisson_weight: nbar must be finite and >= 0");
  }
  if (nbar == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(log_poisson_weight(n, nbar));
}

struct PoissonTruncation {
  std::uint64_t n_min = 0;
  std::uint64_t n_max = 0;
  double tail_mass = 0.0;  // Poisson mass outside [n_min, n_max]
};

namespace detail {

// Sum of W_n for n > n_max, accumulated outward with W_{n+1} = W_n nbar/(n+1).
inline double poisson_upper_tail(std::uint64_t n_max, double nbar) {
  std::uint64_t n = n_max + 1;
  double w = poisson_weight(n, nbar);
  double sum = 0.0;
  while (true) {
    sum += w;
    w *= nbar / static_cast<double>(n + 1);
    ++n;
    if (static_cast<double>(n) > nbar && (w < 1e-300 || w <= 1e-18 * sum)) break;
  }
  return sum;
}

// Sum of W_n for n < n_min, accumulated downward with W_{n-1} = W_n n/nbar.
inline double poisson_lower_tail(std::uint64_t n_min, double nbar) {
  if (n_min == 0) return 0.0;
  std::uint64_t n = n_min - 1;
  double w = poisson_weight(n, nbar);
  double sum = 0.0;
  while (true) {
    sum += w;
    if (n == 0) break;
    w *= static_cast<double>(n) / nbar;
    --n;
    if (static_cast<double>(n) < nbar && (w < 1e-300 || w <= 1e-18 * sum)) break;
  }
  return sum;
}

inline PoissonTruncation poisson_window(double nbar, std::uint64_t half_width) {
  const auto center = static_cast<std::uint64_t>(std::llround(nbar));
  PoissonTruncation t;
  t.n_min = center > half_width ? center - half_width : 0;
  t.n_max = center + half_width;
  t.tail_mass = poisson_lower_tail(t.n_min, nbar) + poisson_upper_tail(t.n_max, nbar);
  return t;
}

}  // namespace detail

/// Smallest window [round(nbar) - h, round(nbar) + h] (clipped at 0) whose
/// excluded Poisson mass is below tol. nbar = 0 gives [0, 0] with no tail.
inline PoissonTruncation poisson_truncation(double nbar, double tol) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw Error(ErrorKind::invalid_argument, "poisson_truncation: nbar must be finite and >= 0");
  }
  if (!(tol > 0.0 && tol < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "poisson_truncation: tol must lie in (0, 1)");
  }
  if (nbar == 0.0) return {};

  // Exponential search for a sufficient half-width, then bisect down to the
  // smallest one. The tail mass is monotone in the half-width.
  std::uint64_t hi = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(std::sqrt(nbar))));
  PoissonTruncation best = detail::poisson_window(nbar, hi);
  std::uint64_t lo = 0;
  while (!(best.tail_mass < tol)) {
    lo = hi;
    hi *= 2;
    best = detail::poisson_window(nbar, hi);
  }
  if (lo == 0) {
    const auto zero = detail::poisson_window(nbar, 0);
    if (zero.tail_mass < tol) return zero;
  }
  // window(lo) fails, window(hi) passes
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    const auto candidate = detail::poisson_window(nbar, mid);
    if (candidate.tail_mass < tol) {
      hi = mid;
      best = candidate;
    } else {
      lo = mid;
    }
  }
  return best;
}

}  // namespace qlai
