#pragma once

// Analytic Mach-Zehnder signal with quantized beam-splitter and mirror pulses.
//
// Post-selected on the ground state and on the closed interferometer
// geometry, the atom leaves through O_l + O_u with
//
//   O_u = e^{i(th0 - th1)}  c(n2)             (x) s(n1)/sqrt(n1) a1^+ (x) a0 s(n0)/sqrt(n0)
//   O_l = e^{i(th1 - th2)}  s(n2)/sqrt(n2) a2^+ (x) a1 s(n1)/sqrt(n1)  (x) c(n0)
//
// and the signal is I = (A/2)(1 + V cos Phi), with
//   A         = 2 <O_l^+ O_l + O_u^+ O_u>
//   V e^{iPhi} = 2 <O_l^+ O_u> / <O_l^+ O_l + O_u^+ O_u>.
//
// The input is a product state over the three modes, so every expectation
// value factorizes into single-mode sums.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>

#include "qlai/error.hpp"
#include "qlai/fields.hpp"

namespace qlai {

/// Pulse slot inside the interferometer.
enum class Slot : std::size_t { bs0 = 0, mirror = 1, bs2 = 2 };
enum class Branch { upper, lower };

inline constexpr double kDefaultSeriesTol = 1e-14;
inline constexpr double kDegenerateAmplitude = 1e-14;
inline constexpr std::array<double, 3> kDefaultAreas = {std::numbers::pi / 2.0, std::numbers::pi,
                                                        std::numbers::pi / 2.0};

struct MzConfig {
  std::array<PulseSpec, 3> pulses;
  double tol = kDefaultSeriesTol;
};

/// Delta theta = th2 - 2 th1 + th0.
inline double coupling_phase(const MzConfig& config) {
  return config.pulses[2].theta_coupling - 2.0 * config.pulses[1].theta_coupling +
         config.pulses[0].theta_coupling;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

namespace detail {

// sum_n conj(psi_{n+shift}) psi_n f(n): the expectation of an operator that
// maps |n> to f(n) |n+shift>.
template <typename F>
complex transition_sum(const FockWindow& w, int shift, F&& f) {
  complex sum{};
  for (std::size_t i = 0; i < w.amplitudes.size(); ++i) {
    const std::size_t n = w.offset + i;
    const long target = static_cast<long>(n) + shift;
    if (target < 0) continue;
    const complex bra = w.at(static_cast<std::size_t>(target));
    if (bra == complex{}) continue;
    sum += std::conj(bra) * w.amplitudes[i] * f(static_cast<double>(n));
  }
  return sum;
}

template <typename F>
double diagonal_sum(const FockWindow& w, F&& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.amplitudes.size(); ++i) {
    sum += std::norm(w.amplitudes[i]) * f(static_cast<double>(w.offset + i));
  }
  return sum;
}

}  // namespace detail

/// Expectation of the single-mode piece of O_u or O_l that acts on the given
/// pulse, without the coupling phase e^{i theta}. The ladder strings are
/// evaluated through their matrix elements,
///   a s(n)/sqrt(n) |n> = s_n |n-1>,   s(n)/sqrt(n) a^+ |n> = s_{n+1} |n+1>,
/// which never divide by sqrt(0). Classical pulses use the limit values
/// (ladder operators -> 1, c -> cos(theta/2), s -> sin(theta/2)).
inline complex branch_factor(const PulseSpec& pulse, Slot slot, Branch branch, double tol = kDefaultSeriesTol) {
  // 0: c(n), +1: s/sqrt(n) a^+, -1: a s/sqrt(n)
  int kind = 0;
  switch (slot) {
    case Slot::bs0: kind = branch == Branch::upper ? -1 : 0; break;
    case Slot::mirror: kind = branch == Branch::upper ? +1 : -1; break;
    case Slot::bs2: kind = branch == Branch::upper ? 0 : +1; break;
  }
  if (is_classical(pulse.state)) {
    return kind == 0 ? pulse.cos_n(0) : pulse.sin_n(0);
  }
  const FockWindow w = fock_window(pulse.state, tol);
  switch (kind) {
    case -1: return detail::transition_sum(w, -1, [&](double n) { return pulse.sin_n(n); });
    case +1: return detail::transition_sum(w, +1, [&](double n) { return pulse.sin_n(n + 1); });
    default: return detail::diagonal_sum(w, [&](double n) { return pulse.cos_n(n); });
  }
}

/// <X_l^+ X_u> for the single-mode pieces X of the two branches at this slot:
///   bs0:    c(n) a s(n)/sqrt(n)          |n> -> c_{n-1} s_n |n-1>
///   mirror: (s(n)/sqrt(n) a^+)^2         |n> -> s_{n+1} s_{n+2} |n+2>
///   bs2:    a s(n) c(n)/sqrt(n)          |n> -> s_n c_n |n-1>
inline complex overlap_factor(const PulseSpec& pulse, Slot slot, double tol = kDefaultSeriesTol) {
  if (is_classical(pulse.state)) {
    const double c = pulse.cos_n(0);
    const double s = pulse.sin_n(0);
    return slot == Slot::mirror ? s * s : c * s;
  }
  const FockWindow w = fock_window(pulse.state, tol);
  switch (slot) {
    case Slot::bs0:
      return detail::transition_sum(w, -1, [&](double n) { return pulse.cos_n(n - 1) * pulse.sin_n(n); });
    case Slot::mirror:
      return detail::transition_sum(w, +2, [&](double n) { return pulse.sin_n(n + 1) * pulse.sin_n(n + 2); });
    case Slot::bs2:
      return detail::transition_sum(w, -1, [&](double n) { return pulse.sin_n(n) * pulse.cos_n(n); });
  }
  return {};
}

/// <X_b^+ X_b>: s^2(n), s^2(n+1) or c^2(n) depending on slot and branch.
inline double population_factor(const PulseSpec& pulse, Slot slot, Branch branch, double tol = kDefaultSeriesTol) {
  enum { cos2, sin2, sin2_shifted } kind = cos2;
  switch (slot) {
    case Slot::bs0: kind = branch == Branch::upper ? sin2 : cos2; break;
    case Slot::mirror: kind = branch == Branch::upper ? sin2_shifted : sin2; break;
    case Slot::bs2: kind = branch == Branch::upper ? cos2 : sin2_shifted; break;
  }
  if (is_classical(pulse.state)) {
    const double v = kind == cos2 ? pulse.cos_n(0) : pulse.sin_n(0);
    return v * v;
  }
  const FockWindow w = fock_window(pulse.state, tol);
  return detail::diagonal_sum(w, [&](double n) {
    const double v = kind == cos2 ? pulse.cos_n(n) : pulse.sin_n(kind == sin2 ? n : n + 1);
    return v * v;
  });
}

/// 2 <O_l^+ O_u> = 2 e^{i Delta theta} prod_l <X_l^+ X_u>_l.
inline complex mz_overlap(const MzConfig& config) {
  complex product = std::polar(2.0, coupling_phase(config));
  for (std::size_t l = 0; l < 3; ++l) product *= overlap_factor(config.pulses[l], static_cast<Slot>(l), config.tol);
  return product;
}

/// A = 2 <O_u^+ O_u + O_l^+ O_l>.
inline double mz_amplitude(const MzConfig& config) {
  double upper = 1.0;
  double lower = 1.0;
  for (std::size_t l = 0; l < 3; ++l) {
    const auto slot = static_cast<Slot>(l);
    upper *= population_factor(config.pulses[l], slot, Branch::upper, config.tol);
    lower *= population_factor(config.pulses[l], slot, Branch::lower, config.tol);
  }
  return 2.0 * (upper + lower);
}

struct MzSignal {
  double amplitude = 0.0;
  double visibility = 0.0;  // signed
  double phase = 0.0;       // (-pi, pi]
  complex fringe_coefficient{};
  bool degenerate = false;       // A below kDegenerateAmplitude: V, Phi undefined and reported as 0
  bool canonical_phase = true;   // false: General states, V = |C| and Phi = arg C
  double imaginary_residual = 0.0;  // Im(C e^{-i Phi}) under the canonical convention

  /// I(phi) = (A/2)(1 + V cos phi)
  double intensity(double phi) const { return 0.5 * amplitude * (1.0 + visibility * std::cos(phi)); }
};

/// Phase that the field states themselves imprint on the fringe:
/// coherent phases enter as phi2 - 2 phi1 + phi0, two-Fock relative phases as
/// delta2 - delta1 + delta0. Empty when a General state has no canonical split.
inline std::optional<double> state_phase(const MzConfig& config) {
  constexpr std::array<double, 3> coherent_weight = {1.0, -2.0, 1.0};
  constexpr std::array<double, 3> two_fock_weight = {1.0, -1.0, 1.0};
  double phase = 0.0;
  for (std::size_t l = 0; l < 3; ++l) {
    const auto& state = config.pulses[l].state;
    if (const auto* c = std::get_if<Coherent>(&state)) {
      phase += coherent_weight[l] * c->phase;
    } else if (const auto* t = std::get_if<TwoFock>(&state)) {
      phase += two_fock_weight[l] * t->delta;
    } else if (std::holds_alternative<General>(state)) {
      return std::nullopt;
    }
  }
  return phase;
}

/// Splits C = V e^{i Phi} with Phi fixed to Delta theta + state phase and V
/// the signed real remainder; General states fall back to V = |C|, Phi = arg C.
inline MzSignal decompose_fringe(const MzConfig& config, double amplitude, complex bare_overlap) {
  MzSignal out;
  out.amplitude = amplitude;
  const auto encoded = state_phase(config);
  out.canonical_phase = encoded.has_value();
  if (!(amplitude >= kDegenerateAmplitude)) {
    out.degenerate = true;
    out.fringe_coefficient = bare_overlap;
    return out;
  }
  const complex c = 2.0 * bare_overlap / amplitude;
  out.fringe_coefficient = c;
  if (encoded) {
    const double phi = coupling_phase(config) + *encoded;
    const complex rotated = c * std::polar(1.0, -phi);
    out.visibility = rotated.real();
    out.imaginary_residual = rotated.imag();
    out.phase = wrap_phase(phi);
  } else {
    out.visibility = std::abs(c);
    out.phase = wrap_phase(std::arg(c));
  }
  return out;
}

inline MzSignal mz_signal(const MzConfig& config) {
  return decompose_fringe(config, mz_amplitude(config), mz_overlap(config));
}

// ---------------------------------------------------------------------------
// Two-Fock superpositions

struct TwoFockClosedForm {
  complex overlap{};  // <O_l^+ O_u>
  bool offsets_match = true;
  std::string diagnostic;
};

/// <O_l^+ O_u> for two-Fock states with m0 = n0-1, m1 = n1-2, m2 = n2-1:
///   e^{i(Delta theta + Delta delta)} c_{n2} s_{n2} s_{n1-1} s_{n1} c_{n0-1} s_{n0} prod gamma eta.
/// Any other offsets give exactly zero (ladder selection rule), flagged in the
/// diagnostic.
inline TwoFockClosedForm mz_two_fock_closed_form(const MzConfig& config) {
  std::array<const TwoFock*, 3> states{};
  for (std::size_t l = 0; l < 3; ++l) {
    states[l] = std::get_if<TwoFock>(&config.pulses[l].state);
    if (states[l] == nullptr) {
      throw Error(ErrorKind::invalid_argument, "mz_two_fock_closed_form: pulse " + std::to_string(l) +
                                                   " is not a two-Fock superposition");
    }
  }
  constexpr std::array<std::size_t, 3> required = {1, 2, 1};
  TwoFockClosedForm out;
  for (std::size_t l = 0; l < 3; ++l) {
    const std::size_t gap = states[l]->n - states[l]->m;
    if (gap != required[l]) {
      out.offsets_match = false;
      out.diagnostic += "OffsetMismatch: pulse " + std::to_string(l) + " has n - m = " + std::to_string(gap) +
                        ", expected " + std::to_string(required[l]) + "; ";
    }
  }
  if (!out.offsets_match) return out;

  const auto& [p0, p1, p2] = config.pulses;
  const double n0 = static_cast<double>(states[0]->n);
  const double n1 = static_cast<double>(states[1]->n);
  const double n2 = static_cast<double>(states[2]->n);
  double magnitude = p2.cos_n(n2) * p2.sin_n(n2) * p1.sin_n(n1 - 1) * p1.sin_n(n1) * p0.cos_n(n0 - 1) * p0.sin_n(n0);
  for (const auto* s : states) magnitude *= s->gamma * s->eta;
  const double phase = coupling_phase(config) + states[2]->delta - states[1]->delta + states[0]->delta;
  out.overlap = std::polar(1.0, phase) * magnitude;
  return out;
}

// ---------------------------------------------------------------------------
// Standard families with nbar_0 = nbar_2 = nbar_1 / 2 = nbar

struct PulseSettings {
  std::array<double, 3> areas = kDefaultAreas;
  std::array<double, 3> couplings = {0.0, 0.0, 0.0};
  std::array<double, 3> state_phases = {0.0, 0.0, 0.0};  // phi_l (coherent) or delta_l (two-Fock)
};

inline constexpr std::array<double, 3> kFamilyScale = {1.0, 2.0, 1.0};

/// Coherent states with |alpha_l|^2 = nbar * (1, 2, 1). A vacuum pulse uses
/// area normalization 1; nothing depends on it because every vacuum term
/// carries s_0 = 0 or a vanishing ladder element.
inline MzConfig coherent_family(double nbar, const PulseSettings& settings = {}, double tol = kDefaultSeriesTol) {
  if (!(nbar >= 0.0)) throw Error(ErrorKind::invalid_argument, "coherent_family: nbar must be >= 0");
  MzConfig config;
  config.tol = tol;
  for (std::size_t l = 0; l < 3; ++l) {
    const double mean = nbar * kFamilyScale[l];
    config.pulses[l] = PulseSpec(settings.areas[l], mean > 0.0 ? mean : 1.0, settings.couplings[l],
                                 Coherent(std::sqrt(mean), settings.state_phases[l]));
  }
  return config;
}

/// Photon number n_l of the upper Fock level for the two-Fock family: the
/// integer nearest nbar_l + k_l/2 (ties upward), k = (1, 2, 1), so that the
/// equal superposition of |n_l - k_l> and |n_l> has mean close to nbar_l.
inline std::size_t two_fock_upper_level(double nbar_l, std::size_t offset) {
  const double target = nbar_l + 0.5 * static_cast<double>(offset);
  return std::max(offset, static_cast<std::size_t>(std::floor(target + 0.5)));
}

/// Two-Fock superpositions gamma|n_l - k_l> + eta|n_l> with the offsets
/// (1, 2, 1) that give a non-vanishing overlap, pulse normalization nbar_l.
inline MzConfig two_fock_family(double nbar, const PulseSettings& settings = {},
                                double gamma = std::numbers::sqrt2 / 2.0, double tol = kDefaultSeriesTol) {
  if (!(nbar > 0.0)) throw Error(ErrorKind::invalid_argument, "two_fock_family: nbar must be > 0");
  constexpr std::array<std::size_t, 3> offsets = {1, 2, 1};
  const double eta = std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
  MzConfig config;
  config.tol = tol;
  for (std::size_t l = 0; l < 3; ++l) {
    const double nbar_l = nbar * kFamilyScale[l];
    const std::size_t n = two_fock_upper_level(nbar_l, offsets[l]);
    config.pulses[l] = PulseSpec(settings.areas[l], nbar_l, settings.couplings[l],
                                 TwoFock(n - offsets[l], n, gamma, eta, settings.state_phases[l]));
  }
  return config;
}

// ---------------------------------------------------------------------------
// Pulse-area optimization for two-Fock inputs

struct AreaBounds {
  double lower = 0.0;
  double upper = 2.0 * std::numbers::pi;
};

struct TwoFockOptimum {
  std::array<double, 3> areas{};
  double visibility = 0.0;  // signed V at the optimum, maximizing |V|
  double amplitude = 0.0;
  double fringe_depth = 0.0;  // A |V| = I_max - I_min
  std::size_t evaluations = 0;
  double max_fringe_depth = 0.0;  // largest A |V| seen anywhere in the search
};

namespace detail {

// Golden-section maximization of f on [a, b].
template <typename F>
double golden_maximize(F&& f, double a, double b, int iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iterations; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

}  // namespace detail

/// Maximizes |V| over (theta_0, theta_1, theta_2) for the balanced two-Fock
/// family at mean photon number nbar: a grid over the open box followed by
/// rounds of per-axis golden-section refinement inside the winning cell.
inline TwoFockOptimum optimize_two_fock_visibility(double nbar, AreaBounds bounds = {}, int grid = 48,
                                                   int rounds = 4) {
  if (!(nbar >= 0.5)) throw Error(ErrorKind::invalid_argument, "optimize_two_fock_visibility: nbar must be >= 1/2");
  if (!(bounds.upper > bounds.lower) || grid < 2) {
    throw Error(ErrorKind::invalid_argument, "optimize_two_fock_visibility: empty search box");
  }
  MzConfig config = two_fock_family(nbar);
  TwoFockOptimum best;
  auto evaluate = [&](const std::array<double, 3>& areas) {
    for (std::size_t l = 0; l < 3; ++l) config.pulses[l].theta_area = areas[l];
    const MzSignal s = mz_signal(config);
    ++best.evaluations;
    const double depth = s.degenerate ? 0.0 : s.amplitude * std::abs(s.visibility);
    best.max_fringe_depth = std::max(best.max_fringe_depth, depth);
    return s;
  };

  const double step = (bounds.upper - bounds.lower) / grid;
  double best_abs = -1.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      for (int k = 0; k < grid; ++k) {
        const std::array<double, 3> areas = {bounds.lower + (i + 0.5) * step, bounds.lower + (j + 0.5) * step,
                                             bounds.lower + (k + 0.5) * step};
        const MzSignal s = evaluate(areas);
        if (!s.degenerate && std::abs(s.visibility) > best_abs) {
          best_abs = std::abs(s.visibility);
          best.areas = areas;
        }
      }
    }
  }

  double half = step;
  for (int round = 0; round < rounds; ++round) {
    for (std::size_t axis = 0; axis < 3; ++axis) {
      auto objective = [&](double x) {
        auto areas = best.areas;
        areas[axis] = x;
        const MzSignal s = evaluate(areas);
        return s.degenerate ? -1.0 : std::abs(s.visibility);
      };
      const double lo = std::max(bounds.lower, best.areas[axis] - half);
      const double hi = std::min(bounds.upper, best.areas[axis] + half);
      const double x = detail::golden_maximize(objective, lo, hi, 40);
      if (objective(x) > objective(best.areas[axis])) best.areas[axis] = x;
    }
    half *= 0.5;
  }

  const MzSignal s = evaluate(best.areas);
  best.visibility = s.visibility;
  best.amplitude = s.amplitude;
  best.fringe_depth = s.amplitude * std::abs(s.visibility);
  return best;
}

}  // namespace qlai
