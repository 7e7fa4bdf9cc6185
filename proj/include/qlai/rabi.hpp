#pragma once

// Ground-state probability P_g after a resonant Bragg/Raman pulse of area
// theta, for classical, Fock and coherent driving fields.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "qlai/core_math.hpp"
#include "qlai/error.hpp"

namespace qlai {

inline double pg_classical(double theta) {
  const double c = std::cos(0.5 * theta);
  return c * c;
}

inline double pg_fock(double theta, std::uint64_t n, double nbar) {
  if (!(nbar > 0.0)) throw Error(ErrorKind::invalid_argument, "pg_fock: nbar must be > 0");
  const double c = std::cos(0.5 * theta * std::sqrt(static_cast<double>(n) / nbar));
  return c * c;
}

/// Exact Poisson average of cos^2((theta/2) sqrt(n/nbar)) with nbar = alpha_sq.
inline double pg_coherent(double theta, double alpha_sq, double tol) {
  if (!(alpha_sq >= 0.0)) throw Error(ErrorKind::invalid_argument, "pg_coherent: alpha_sq must be >= 0");
  if (alpha_sq == 0.0) return 1.0;
  const auto window = poisson_truncation(alpha_sq, tol);
  double sum = 0.0;
  for (auto n = window.n_min; n <= window.n_max; ++n) {
    sum += poisson_weight(n, alpha_sq) * pg_fock(theta, n, alpha_sq);
  }
  return sum;
}

/// Gaussian-damping approximation (1/2)[1 + exp(-theta^2 / (8 alpha_sq)) cos theta].
/// Describes the initial collapse but no revival.
inline double pg_coherent_approx(double theta, double alpha_sq) {
  if (!(alpha_sq > 0.0)) throw Error(ErrorKind::invalid_argument, "pg_coherent_approx: alpha_sq must be > 0");
  return 0.5 * (1.0 + std::exp(-theta * theta / (8.0 * alpha_sq)) * std::cos(theta));
}

struct RabiCurve {
  std::vector<double> theta_grid;
  std::vector<double> pg_values;
  std::vector<double> pg_approx;  // empty when alpha_sq == 0
};

inline RabiCurve rabi_curve(std::span<const double> thetas, double alpha_sq, double tol) {
  RabiCurve curve;
  curve.theta_grid.assign(thetas.begin(), thetas.end());
  curve.pg_values.reserve(thetas.size());
  for (double theta : thetas) curve.pg_values.push_back(pg_coherent(theta, alpha_sq, tol));
  if (alpha_sq > 0.0) {
    curve.pg_approx.reserve(thetas.size());
    for (double theta : thetas) curve.pg_approx.push_back(pg_coherent_approx(theta, alpha_sq));
  }
  return curve;
}

}  // namespace qlai
