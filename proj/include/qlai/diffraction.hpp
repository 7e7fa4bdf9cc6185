#pragma once

// Raman-Nath far-field momentum distributions W(wp), wp = p / (hbar k),
// after a standing-wave pulse of area theta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qlai/core_math.hpp"
#include "qlai/error.hpp"

namespace qlai {

/// W(wp) = J_wp(theta)^2 for a classical field.
inline double raman_nath_classical(int wp, double theta) {
  const double j = bessel_j(wp, theta);
  return j * j;
}

/// Fock state |n>: the classical pattern at effective area theta sqrt(n/nbar).
inline double raman_nath_fock(int wp, double theta, std::uint64_t n, double nbar) {
  if (!(nbar > 0.0)) throw Error(ErrorKind::invalid_argument, "raman_nath_fock: nbar must be > 0");
  const double j = bessel_j(wp, theta * std::sqrt(static_cast<double>(n) / nbar));
  return j * j;
}

/// Coherent state with |alpha|^2 = alpha_sq: Poisson average of the Fock
/// patterns, normalized to nbar = alpha_sq, truncated at tail mass tol.
inline double raman_nath_coherent(int wp, double theta, double alpha_sq, double tol) {
  if (!(alpha_sq >= 0.0)) throw Error(ErrorKind::invalid_argument, "raman_nath_coherent: alpha_sq must be >= 0");
  if (alpha_sq == 0.0) return wp == 0 ? 1.0 : 0.0;  // vacuum
  const auto window = poisson_truncation(alpha_sq, tol);
  double sum = 0.0;
  for (auto n = window.n_min; n <= window.n_max; ++n) {
    sum += poisson_weight(n, alpha_sq) * raman_nath_fock(wp, theta, n, alpha_sq);
  }
  return sum;
}

enum class DiffractionFieldKind { classical, fock, coherent };

struct DiffractionField {
  DiffractionFieldKind kind = DiffractionFieldKind::classical;
  std::uint64_t n = 0;  // photon number (fock)
  double nbar = 1.0;    // pulse normalization (fock) or |alpha|^2 (coherent)

  static DiffractionField classical() { return {}; }
  static DiffractionField fock(std::uint64_t n, double nbar) { return {DiffractionFieldKind::fock, n, nbar}; }
  static DiffractionField coherent(double alpha_sq) { return {DiffractionFieldKind::coherent, 0, alpha_sq}; }
};

inline double raman_nath(int wp, double theta, const DiffractionField& field, double tol) {
  switch (field.kind) {
    case DiffractionFieldKind::classical: return raman_nath_classical(wp, theta);
    case DiffractionFieldKind::fock: return raman_nath_fock(wp, theta, field.n, field.nbar);
    case DiffractionFieldKind::coherent: return raman_nath_coherent(wp, theta, field.nbar, tol);
  }
  return 0.0;
}

struct MomentumDistribution {
  std::vector<int> wp_values;
  std::vector<double> probabilities;
  double normalization_deficit = 0.0;  // 1 - sum of probabilities
};

/// Default half-width of the tabulation window, ceil(theta) + 20.
inline int default_diffraction_window(double theta) { return static_cast<int>(std::ceil(std::abs(theta))) + 20; }

/// Half-width that holds the pattern of a quantized field. Photon numbers
/// above nbar drive higher orders, so the area is scaled to the largest
/// photon number that matters and an Airy-tail margin is added. Never
/// narrower than default_diffraction_window(theta).
inline int default_diffraction_window(double theta, const DiffractionField& field, double tol = 1e-12) {
  double n_eff = 1.0;
  double nbar = 1.0;
  if (field.kind == DiffractionFieldKind::fock) {
    n_eff = static_cast<double>(field.n);
    nbar = field.nbar;
  } else if (field.kind == DiffractionFieldKind::coherent && field.nbar > 0.0) {
    n_eff = static_cast<double>(poisson_truncation(field.nbar, tol).n_max);
    nbar = field.nbar;
  }
  const double scaled = std::abs(theta) * std::sqrt(std::max(n_eff / nbar, 1.0));
  const double margin = std::max(20.0, std::ceil(6.0 * std::cbrt(scaled)));
  return static_cast<int>(std::ceil(scaled) + margin);
}

/// Tabulates W(wp) for wp in [-half_width, half_width].
///
/// Raises WindowTooSmall when the outermost order still carries more than tol
/// probability, i.e. when the window clips the pattern.
inline MomentumDistribution distribution(double theta, const DiffractionField& field, int half_width,
                                         double tol = 1e-12) {
  if (!(theta >= 0.0)) throw Error(ErrorKind::invalid_argument, "distribution: theta must be >= 0");
  if (half_width < 0) throw Error(ErrorKind::invalid_argument, "distribution: negative window");
  MomentumDistribution out;
  out.wp_values.reserve(2 * half_width + 1);
  out.probabilities.reserve(2 * half_width + 1);
  double total = 0.0;
  for (int wp = -half_width; wp <= half_width; ++wp) {
    const double w = raman_nath(wp, theta, field, tol);
    out.wp_values.push_back(wp);
    out.probabilities.push_back(w);
    total += w;
  }
  const double edge = std::max(out.probabilities.front(), out.probabilities.back());
  if (edge > tol) {
    throw Error(ErrorKind::window_too_small, "probability " + std::to_string(edge) + " at |wp| = " +
                                                 std::to_string(half_width) + " exceeds tol");
  }
  out.normalization_deficit = 1.0 - total;
  return out;
}

}  // namespace qlai
