#pragma once

// Brute-force reference simulation of the full pulse sequence
//   U_MZ = S2 U S1 U S0
// on a truncated product space
//   internal {g, e} (x) Fock(mode 0) (x) Fock(mode 1) (x) Fock(mode 2) (x) COM.
//
// The COM factor has two labels: the momentum offset j in units of hbar k
// around p0, and the wave-packet displacement d in units of hbar k T / m that
// the packet picked up during the free evolutions. In this scattering model
// the momentum is tied to the internal state, so the detector's location
// (the displacement) is what separates the two closed branches (d = 1) from
// the spurious ones (g-g-g at d = 0, e-e-g at d = 2).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "qlai/core_math.hpp"
#include "qlai/error.hpp"
#include "qlai/fields.hpp"
#include "qlai/interferometer.hpp"

namespace qlai {

inline constexpr double kReducedPlanck = 1.054571817e-34;  // J s
inline constexpr int kDetectorDisplacement = 1;

struct HilbertConfig {
  std::array<std::size_t, 3> n_max{};  // top Fock level kept per mode
  int lattice_half_width = 3;          // J: momentum offsets j in [-J, J]
  double duration = 0.0;              // T (s) between pulses
  double omega = 0.0;                  // field frequency (rad/s)
  double omega_atom = 0.0;             // internal splitting (rad/s)
  double mass = 1.443160648e-25;       // kg (87Rb)
  double p0 = 0.0;                     // kg m/s
  double hbar_k = 1.7e-27;             // kg m/s per lattice step
  int harmonics = 16;                  // theta_2 samples for the fringe fit
  double amplitude_tol = 1e-12;        // largest amplitude allowed to leave the truncated space

  int displacement_half_width() const { return 2 * lattice_half_width; }

  void validate() const {
    if (lattice_half_width < 3) throw Error(ErrorKind::invalid_argument, "HilbertConfig: J must be >= 3");
    if (harmonics < 8) throw Error(ErrorKind::invalid_argument, "HilbertConfig: need at least 8 theta_2 samples");
    if (!(mass > 0.0)) throw Error(ErrorKind::invalid_argument, "HilbertConfig: mass must be > 0");
  }
};

/// Dense state vector. Index layout, fastest first: internal (g = 0, e = 1),
/// n0, n1, n2, momentum offset j + J, displacement d + 2J.
class TensorState {
 public:
  explicit TensorState(const HilbertConfig& cfg)
      : n_max_(cfg.n_max), half_width_(cfg.lattice_half_width) {
    strides_[0] = 1;
    strides_[1] = 2;
    strides_[2] = strides_[1] * (n_max_[0] + 1);
    strides_[3] = strides_[2] * (n_max_[1] + 1);
    strides_[4] = strides_[3] * (n_max_[2] + 1);
    strides_[5] = strides_[4] * momentum_size();
    data_.assign(strides_[5] * displacement_size(), complex{});
  }

  std::size_t momentum_size() const { return static_cast<std::size_t>(2 * half_width_ + 1); }
  std::size_t displacement_size() const { return static_cast<std::size_t>(4 * half_width_ + 1); }
  int half_width() const { return half_width_; }
  const std::array<std::size_t, 3>& n_max() const { return n_max_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int internal, std::array<std::size_t, 3> n, int j, int d) const {
    return static_cast<std::size_t>(internal) * strides_[0] + n[0] * strides_[1] + n[1] * strides_[2] +
           n[2] * strides_[3] + static_cast<std::size_t>(j + half_width_) * strides_[4] +
           static_cast<std::size_t>(d + 2 * half_width_) * strides_[5];
  }

  complex& operator()(int internal, std::array<std::size_t, 3> n, int j, int d) {
    return data_[index(internal, n, j, d)];
  }
  complex operator()(int internal, std::array<std::size_t, 3> n, int j, int d) const {
    return data_[index(internal, n, j, d)];
  }

  std::vector<complex>& data() { return data_; }
  const std::vector<complex>& data() const { return data_; }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& a : data_) s += std::norm(a);
    return s;
  }

  /// Probability in the detector port: internal g, momentum p0, displacement d.
  double postselected_probability(int displacement = kDetectorDisplacement) const {
    double s = 0.0;
    for (std::size_t n2 = 0; n2 <= n_max_[2]; ++n2) {
      for (std::size_t n1 = 0; n1 <= n_max_[1]; ++n1) {
        for (std::size_t n0 = 0; n0 <= n_max_[0]; ++n0) {
          s += std::norm((*this)(0, {n0, n1, n2}, 0, displacement));
        }
      }
    }
    return s;
  }

  /// Visits every basis element as (internal, {n0, n1, n2}, j, d, amplitude).
  template <typename F>
  void for_each(F&& f) const {
    const int J = half_width_;
    std::size_t i = 0;
    for (int d = -2 * J; d <= 2 * J; ++d) {
      for (int j = -J; j <= J; ++j) {
        for (std::size_t n2 = 0; n2 <= n_max_[2]; ++n2) {
          for (std::size_t n1 = 0; n1 <= n_max_[1]; ++n1) {
            for (std::size_t n0 = 0; n0 <= n_max_[0]; ++n0) {
              for (int internal = 0; internal < 2; ++internal, ++i) {
                f(internal, std::array<std::size_t, 3>{n0, n1, n2}, j, d, data_[i]);
              }
            }
          }
        }
      }
    }
  }

 private:
  std::array<std::size_t, 3> n_max_;
  int half_width_;
  std::array<std::size_t, 6> strides_{};
  std::vector<complex> data_;
};

/// Mode sizes that hold the three input states with one spare level for the
/// single photon each mode can gain. Coherent states are cut at tail mass tol.
inline HilbertConfig sized_for(const MzConfig& config, double tol = 1e-15, HilbertConfig base = {}) {
  for (std::size_t l = 0; l < 3; ++l) {
    const FockWindow w = fock_window(config.pulses[l].state, tol);
    base.n_max[l] = w.last() + 1;
  }
  return base;
}

/// |g> (x) psi0 (x) psi1 (x) psi2 (x) |j = 0, d = 0>. Coherent states are
/// injected up to their tol window only, leaving the top level empty.
inline TensorState initial_state(const MzConfig& config, const HilbertConfig& cfg, double tol = 1e-15) {
  cfg.validate();
  std::array<std::vector<complex>, 3> modes;
  for (std::size_t l = 0; l < 3; ++l) {
    const auto& state = config.pulses[l].state;
    if (is_classical(state)) {
      throw Error(ErrorKind::classical_has_no_fock_expansion, "oracle needs Fock expansions; pulse " +
                                                                  std::to_string(l) + " is classical");
    }
    const FockWindow w = fock_window(state, tol);
    if (w.last() + 1 > cfg.n_max[l]) {
      throw Error(ErrorKind::truncation_too_small, "mode " + std::to_string(l) + " needs n_max >= " +
                                                       std::to_string(w.last() + 1) + ", got " +
                                                       std::to_string(cfg.n_max[l]));
    }
    modes[l].assign(cfg.n_max[l] + 1, complex{});
    for (std::size_t i = 0; i < w.amplitudes.size(); ++i) modes[l][w.offset + i] = w.amplitudes[i];
  }
  TensorState state(cfg);
  for (std::size_t n2 = 0; n2 <= cfg.n_max[2]; ++n2) {
    for (std::size_t n1 = 0; n1 <= cfg.n_max[1]; ++n1) {
      for (std::size_t n0 = 0; n0 <= cfg.n_max[0]; ++n0) {
        state(0, {n0, n1, n2}, 0, 0) = modes[0][n0] * modes[1][n1] * modes[2][n2];
      }
    }
  }
  return state;
}

/// Applies the scattering operator of one pulse to the given mode:
///   |g, n, j> -> c_n |g, n, j> - i e^{i theta} s_n |e, n-1, j+1>
///   |e, n, j> -> c_{n+1} |e, n, j> - i e^{-i theta} s_{n+1} |g, n+1, j-1>
/// Amplitude that would leave the momentum lattice raises LatticeOverflow;
/// amplitude above amplitude_tol that would need Fock level n_max + 1 raises
/// TruncationTooSmall.
inline TensorState apply_scattering(const TensorState& in, const PulseSpec& pulse, std::size_t mode_index,
                                    double amplitude_tol = 1e-12) {
  if (mode_index > 2) throw Error(ErrorKind::invalid_argument, "apply_scattering: mode index must be 0, 1 or 2");
  if (is_classical(pulse.state)) {
    throw Error(ErrorKind::classical_has_no_fock_expansion, "apply_scattering: classical pulse has no ladder action");
  }
  const std::size_t top = in.n_max()[mode_index];
  std::vector<double> c(top + 2), s(top + 2);
  for (std::size_t n = 0; n < top + 2; ++n) {
    c[n] = pulse.cos_n(static_cast<double>(n));
    s[n] = pulse.sin_n(static_cast<double>(n));
  }
  const complex absorb = complex{0.0, -1.0} * std::polar(1.0, pulse.theta_coupling);
  const complex emit = complex{0.0, -1.0} * std::polar(1.0, -pulse.theta_coupling);
  const int J = in.half_width();

  TensorState out = in;
  std::fill(out.data().begin(), out.data().end(), complex{});
  in.for_each([&](int internal, std::array<std::size_t, 3> n, int j, int d, complex a) {
    if (a == complex{}) return;
    const std::size_t k = n[mode_index];
    if (internal == 0) {
      out(0, n, j, d) += c[k] * a;
      if (k == 0 || s[k] == 0.0) return;
      if (j + 1 > J) throw Error(ErrorKind::lattice_overflow, "absorption would leave the momentum lattice");
      auto m = n;
      m[mode_index] = k - 1;
      out(1, m, j + 1, d) += absorb * s[k] * a;
    } else {
      out(1, n, j, d) += c[k + 1] * a;
      if (s[k + 1] == 0.0) return;
      if (k + 1 > top) {
        if (std::abs(a) > amplitude_tol) {
          throw Error(ErrorKind::truncation_too_small, "emission needs Fock level " + std::to_string(k + 1) +
                                                           " in mode " + std::to_string(mode_index));
        }
        return;
      }
      if (j - 1 < -J) throw Error(ErrorKind::lattice_overflow, "emission would leave the momentum lattice");
      auto m = n;
      m[mode_index] = k + 1;
      out(0, m, j - 1, d) += emit * s[k + 1] * a;
    }
  });
  return out;
}

/// Free evolution for time T: the diagonal phase
///   exp[-i (p^2 / (2 m hbar) + omega (n0 + n1 + n2) + omega_a [e]) T]
/// with p = p0 + j hbar k, while the packet moves by j displacement units.
inline TensorState apply_free_evolution(const TensorState& in, const HilbertConfig& cfg) {
  const int J = in.half_width();
  std::vector<double> kinetic(2 * J + 1);
  for (int j = -J; j <= J; ++j) {
    const double p = cfg.p0 + j * cfg.hbar_k;
    kinetic[j + J] = p * p / (2.0 * cfg.mass * kReducedPlanck);
  }
  TensorState out = in;
  std::fill(out.data().begin(), out.data().end(), complex{});
  in.for_each([&](int internal, std::array<std::size_t, 3> n, int j, int d, complex a) {
    if (a == complex{}) return;
    const int moved = d + j;
    if (std::abs(moved) > 2 * J) throw Error(ErrorKind::lattice_overflow, "packet displacement left the lattice");
    const double photons = static_cast<double>(n[0] + n[1] + n[2]);
    const double rate = kinetic[j + J] + cfg.omega * photons + (internal == 1 ? cfg.omega_atom : 0.0);
    out(internal, n, j, moved) += std::polar(1.0, -rate * cfg.duration) * a;
  });
  return out;
}

struct OracleResult {
  MzSignal signal;
  complex bare_overlap{};           // 2 <O_l^+ O_u> at the configured theta_2
  std::vector<double> intensities;  // postselected probability per theta_2 sample
  double harmonic_residual = 0.0;   // power above the first harmonic / total power
  double norm_drift = 0.0;          // max |norm^2 - initial norm^2| over the sequence
  double initial_norm_sq = 0.0;
  double final_norm_sq = 0.0;       // all internal states, momenta and displacements
};

/// Runs the full sequence, sweeps theta_2 over K equally spaced values, and
/// fits the postselected probability to (A/2)(1 + Re[C e^{i theta_2}]) by a
/// discrete Fourier transform. Returns A, V, Phi at the configured theta_2,
/// decomposed with the same convention as mz_signal.
inline OracleResult run_mz_oracle(const MzConfig& config, const HilbertConfig& cfg, double tol = 1e-15) {
  cfg.validate();
  OracleResult result;
  const TensorState start = initial_state(config, cfg, tol);
  result.initial_norm_sq = start.norm_sq();
  auto track = [&](const TensorState& s) {
    result.norm_drift = std::max(result.norm_drift, std::abs(s.norm_sq() - result.initial_norm_sq));
  };

  TensorState state = apply_scattering(start, config.pulses[0], 0, cfg.amplitude_tol);
  track(state);
  state = apply_free_evolution(state, cfg);
  track(state);
  state = apply_scattering(state, config.pulses[1], 1, cfg.amplitude_tol);
  track(state);
  state = apply_free_evolution(state, cfg);
  track(state);

  const int K = cfg.harmonics;
  result.intensities.resize(K);
  PulseSpec last = config.pulses[2];
  for (int k = 0; k < K; ++k) {
    last.theta_coupling = 2.0 * std::numbers::pi * k / K;
    const TensorState out = apply_scattering(state, last, 2, cfg.amplitude_tol);
    track(out);
    result.intensities[k] = out.postselected_probability();
  }
  const TensorState final_state = apply_scattering(state, config.pulses[2], 2, cfg.amplitude_tol);
  track(final_state);
  result.final_norm_sq = final_state.norm_sq();

  std::vector<complex> spectrum(K);
  double total_power = 0.0;
  for (int h = 0; h < K; ++h) {
    complex f{};
    for (int k = 0; k < K; ++k) f += result.intensities[k] * std::polar(1.0, -2.0 * std::numbers::pi * h * k / K);
    spectrum[h] = f / static_cast<double>(K);
    total_power += std::norm(spectrum[h]);
  }
  double higher_power = 0.0;
  for (int h = 2; h <= K - 2; ++h) higher_power += std::norm(spectrum[h]);
  result.harmonic_residual = total_power > 0.0 ? higher_power / total_power : 0.0;
  if (result.harmonic_residual > 1e-10) {
    throw Error(ErrorKind::harmonic_residual,
                "postselected signal is not a pure first harmonic in theta_2 (residual " +
                    std::to_string(result.harmonic_residual) + ")");
  }

  const double amplitude = 2.0 * spectrum[0].real();
  result.bare_overlap = 2.0 * spectrum[1] * std::polar(1.0, config.pulses[2].theta_coupling);
  result.signal = decompose_fringe(config, amplitude, result.bare_overlap);
  return result;
}

}  // namespace qlai
