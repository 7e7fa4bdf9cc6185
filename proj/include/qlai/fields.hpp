#pragma once

// Quantum state of a single light mode and its Fock-basis expansion.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "qlai/core_math.hpp"
#include "qlai/error.hpp"

namespace qlai {

using complex = std::complex<double>;

/// Infinite-intensity limit of the field. Has closed-form answers everywhere
/// and deliberately no Fock expansion.
struct Classical {};

struct Fock {
  std::size_t n = 0;
};

/// Coherent state |alpha> with alpha = magnitude * e^{i phase}.
struct Coherent {
  double magnitude = 0.0;
  double phase = 0.0;

  Coherent() = default;
  Coherent(double magnitude_, double phase_) : magnitude(magnitude_), phase(phase_) {
    if (!(magnitude >= 0.0) || !std::isfinite(magnitude) || !std::isfinite(phase)) {
      throw Error(ErrorKind::invalid_argument, "Coherent: magnitude must be finite and >= 0");
    }
  }
};

/// gamma e^{-i delta/2} |m> + eta e^{+i delta/2} |n> with m < n and
/// gamma^2 + eta^2 = 1.
struct TwoFock {
  std::size_t m = 0;
  std::size_t n = 1;
  double gamma = 1.0;
  double eta = 0.0;
  double delta = 0.0;

  TwoFock() = default;
  TwoFock(std::size_t m_, std::size_t n_, double gamma_, double eta_, double delta_)
      : m(m_), n(n_), gamma(gamma_), eta(eta_), delta(delta_) {
    if (m >= n) throw Error(ErrorKind::invalid_argument, "TwoFock: requires m < n");
    if (std::abs(gamma * gamma + eta * eta - 1.0) > 1e-12) {
      throw Error(ErrorKind::invalid_argument, "TwoFock: gamma^2 + eta^2 must equal 1 within 1e-12");
    }
    if (!std::isfinite(delta)) throw Error(ErrorKind::invalid_argument, "TwoFock: delta must be finite");
  }

  /// Equal-weight superposition, gamma = eta = 1/sqrt(2).
  static TwoFock balanced(std::size_t m, std::size_t n, double delta = 0.0) {
    return TwoFock(m, n, std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0, delta);
  }
};

/// Arbitrary pure state given by its amplitudes <n|psi>, n = 0..size-1.
/// Normalized on construction; the input norm must already be 1 within 1e-10.
class General {
 public:
  explicit General(std::vector<complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.empty()) throw Error(ErrorKind::invalid_argument, "General: empty amplitude vector");
    double norm_sq = 0.0;
    for (const auto& a : amplitudes_) norm_sq += std::norm(a);
    if (!std::isfinite(norm_sq) || std::abs(norm_sq - 1.0) > 1e-10) {
      throw Error(ErrorKind::invalid_argument,
                  "General: amplitudes must have unit norm within 1e-10 (got " + std::to_string(norm_sq) + ")");
    }
    const double scale = 1.0 / std::sqrt(norm_sq);
    for (auto& a : amplitudes_) a *= scale;
  }

  const std::vector<complex>& amplitudes() const noexcept { return amplitudes_; }
  std::size_t n_max() const noexcept { return amplitudes_.size() - 1; }

 private:
  std::vector<complex> amplitudes_;
};

using FieldState = std::variant<Classical, Fock, Coherent, TwoFock, General>;

inline bool is_classical(const FieldState& state) { return std::holds_alternative<Classical>(state); }

inline std::string describe(const FieldState& state) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Classical>) {
          return "classical";
        } else if constexpr (std::is_same_v<T, Fock>) {
          return "fock(n=" + std::to_string(s.n) + ")";
        } else if constexpr (std::is_same_v<T, Coherent>) {
          return "coherent(magnitude=" + std::to_string(s.magnitude) + ", phase=" + std::to_string(s.phase) + ")";
        } else if constexpr (std::is_same_v<T, TwoFock>) {
          return "two_fock(m=" + std::to_string(s.m) + ", n=" + std::to_string(s.n) +
                 ", gamma=" + std::to_string(s.gamma) + ", eta=" + std::to_string(s.eta) +
                 ", delta=" + std::to_string(s.delta) + ")";
        } else {
          return "general(n_max=" + std::to_string(s.n_max()) + ")";
        }
      },
      state);
}

/// Mean photon number <n>. Classical fields have none.
inline double mean_photon_number(const FieldState& state) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Classical>) {
          throw Error(ErrorKind::classical_has_no_photon_number, "classical field has no photon number");
        } else if constexpr (std::is_same_v<T, Fock>) {
          return static_cast<double>(s.n);
        } else if constexpr (std::is_same_v<T, Coherent>) {
          return s.magnitude * s.magnitude;
        } else if constexpr (std::is_same_v<T, TwoFock>) {
          return s.gamma * s.gamma * static_cast<double>(s.m) + s.eta * s.eta * static_cast<double>(s.n);
        } else {
          double mean = 0.0;
          const auto& a = s.amplitudes();
          for (std::size_t n = 0; n < a.size(); ++n) mean += static_cast<double>(n) * std::norm(a[n]);
          return mean;
        }
      },
      state);
}

/// Contiguous slice [offset, offset + amplitudes.size()) of a Fock expansion.
/// Everything outside the slice is zero (or below the truncation tolerance).
struct FockWindow {
  std::size_t offset = 0;
  std::vector<complex> amplitudes;

  std::size_t first() const noexcept { return offset; }
  std::size_t last() const noexcept { return offset + amplitudes.size() - 1; }

  complex at(std::size_t n) const noexcept {
    if (n < offset || n >= offset + amplitudes.size()) return {};
    return amplitudes[n - offset];
  }

  double norm_sq() const noexcept {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
  }
};

namespace detail {

inline complex coherent_amplitude(std::size_t n, const Coherent& c) {
  const double nbar = c.magnitude * c.magnitude;
  if (nbar == 0.0) return n == 0 ? complex{1.0, 0.0} : complex{};
  const double magnitude = std::exp(0.5 * log_poisson_weight(n, nbar));
  return std::polar(magnitude, static_cast<double>(n) * c.phase);
}

}  // namespace detail

/// Minimal window holding the state. Coherent states are cut at the Poisson
/// window whose excluded mass is below tol.
inline FockWindow fock_window(const FieldState& state, double tol) {
  return std::visit(
      [tol](const auto& s) -> FockWindow {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Classical>) {
          throw Error(ErrorKind::classical_has_no_fock_expansion, "classical field has no Fock expansion");
        } else if constexpr (std::is_same_v<T, Fock>) {
          return {s.n, {complex{1.0, 0.0}}};
        } else if constexpr (std::is_same_v<T, Coherent>) {
          const auto window = poisson_truncation(s.magnitude * s.magnitude, tol);
          FockWindow w{static_cast<std::size_t>(window.n_min), {}};
          w.amplitudes.reserve(window.n_max - window.n_min + 1);
          for (auto n = window.n_min; n <= window.n_max; ++n) {
            w.amplitudes.push_back(detail::coherent_amplitude(static_cast<std::size_t>(n), s));
          }
          return w;
        } else if constexpr (std::is_same_v<T, TwoFock>) {
          FockWindow w{s.m, std::vector<complex>(s.n - s.m + 1)};
          w.amplitudes.front() = s.gamma * std::polar(1.0, -0.5 * s.delta);
          w.amplitudes.back() = s.eta * std::polar(1.0, 0.5 * s.delta);
          return w;
        } else {
          return {0, s.amplitudes()};
        }
      },
      state);
}

struct FockAmplitudes {
  std::vector<complex> amplitudes;  // index n holds <n|psi>, n = 0..n_max
  double norm = 0.0;                // < 1 only through coherent-state truncation
};

/// Fock-basis expansion truncated at n_max.
///
/// Fock, TwoFock and General states must fit entirely (TruncationTooSmall
/// otherwise); coherent states are cut at n_max and the lost norm shows up in
/// the returned norm.
inline FockAmplitudes fock_amplitudes(const FieldState& state, std::size_t n_max) {
  FockAmplitudes out{std::vector<complex>(n_max + 1), 0.0};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Classical>) {
          throw Error(ErrorKind::classical_has_no_fock_expansion, "classical field has no Fock expansion");
        } else if constexpr (std::is_same_v<T, Coherent>) {
          for (std::size_t n = 0; n <= n_max; ++n) out.amplitudes[n] = detail::coherent_amplitude(n, s);
        } else {
          const FockWindow w = fock_window(state, 0.5);  // tol unused for exact states
          if (w.last() > n_max) {
            throw Error(ErrorKind::truncation_too_small, "state occupies Fock level " + std::to_string(w.last()) +
                                                             " above n_max=" + std::to_string(n_max));
          }
          for (std::size_t i = 0; i < w.amplitudes.size(); ++i) out.amplitudes[w.offset + i] = w.amplitudes[i];
        }
      },
      state);
  double norm_sq = 0.0;
  for (const auto& a : out.amplitudes) norm_sq += std::norm(a);
  out.norm = std::sqrt(norm_sq);
  return out;
}

/// One atom-optics light pulse.
///
/// theta_area is the pulse area at the normalization photon number nbar;
/// photon number n sees the effective area theta_area * sqrt(n / nbar).
/// Classical pulses ignore nbar entirely.
struct PulseSpec {
  double theta_area = 0.0;
  double nbar = 1.0;
  double theta_coupling = 0.0;
  FieldState state = Classical{};

  PulseSpec() = default;
  PulseSpec(double theta_area_, double nbar_, double theta_coupling_, FieldState state_)
      : theta_area(theta_area_), nbar(nbar_), theta_coupling(theta_coupling_), state(std::move(state_)) {
    if (!(nbar > 0.0) || !std::isfinite(nbar)) {
      throw Error(ErrorKind::invalid_argument, "PulseSpec: nbar must be finite and > 0");
    }
    if (!std::isfinite(theta_area) || !std::isfinite(theta_coupling)) {
      throw Error(ErrorKind::invalid_argument, "PulseSpec: areas and phases must be finite");
    }
  }

  /// Pulse whose area normalization follows the state's own mean photon
  /// number (1 for classical fields, where it is unused).
  static PulseSpec matched(FieldState state, double theta_area, double theta_coupling = 0.0) {
    const double nbar = is_classical(state) ? 1.0 : mean_photon_number(state);
    return PulseSpec(theta_area, nbar, theta_coupling, std::move(state));
  }

  // c_n = cos((theta/2) sqrt(n/nbar)), s_n = sin(...)
  double rabi_angle(double n) const {
    if (is_classical(state)) return 0.5 * theta_area;
    return 0.5 * theta_area * std::sqrt(n / nbar);
  }
  double cos_n(double n) const { return std::cos(rabi_angle(n)); }
  double sin_n(double n) const { return std::sin(rabi_angle(n)); }
};

}  // namespace qlai
