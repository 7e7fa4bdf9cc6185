#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "qlai/interferometer.hpp"

namespace {

using namespace qlai;
constexpr double kPi = std::numbers::pi;

MzConfig classical_config(double th0, double th1, double th2) {
  MzConfig c;
  c.pulses = {PulseSpec(kPi / 2, 1.0, th0, Classical{}), PulseSpec(kPi, 1.0, th1, Classical{}),
              PulseSpec(kPi / 2, 1.0, th2, Classical{})};
  return c;
}

// Test-side pulse description with explicit amplitudes up to the cutoff.
oracle::Pulse reference_pulse(const PulseSpec& p, std::size_t cutoff) {
  oracle::Pulse out{p.theta_area, p.nbar, p.theta_coupling, {}};
  if (const auto* c = std::get_if<Coherent>(&p.state)) {
    out.psi = oracle::coherent_amplitudes(c->magnitude * c->magnitude, c->phase, cutoff);
  } else {
    const auto f = fock_amplitudes(p.state, cutoff);
    out.psi = f.amplitudes;
  }
  return out;
}

std::vector<oracle::Pulse> reference_pulses(const MzConfig& c, std::size_t cutoff) {
  return {reference_pulse(c.pulses[0], cutoff), reference_pulse(c.pulses[1], cutoff),
          reference_pulse(c.pulses[2], cutoff)};
}

TEST(MzSignal, ClassicalDefaultsGiveUnitAmplitudeAndVisibility) {
  const auto s = mz_signal(classical_config(0.0, 0.0, 0.0));
  EXPECT_NEAR(s.amplitude, 1.0, 1e-15);
  EXPECT_NEAR(s.visibility, 1.0, 1e-15);
  EXPECT_NEAR(s.phase, 0.0, 1e-15);
  EXPECT_NEAR(std::abs(mz_overlap(classical_config(0.0, 0.0, 0.0)) - 0.5), 0.0, 1e-15);
}

TEST(MzSignal, ClassicalPhaseIsCouplingCombination) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 50; ++i) {
    const double a = angle(rng), b = angle(rng), c = angle(rng);
    const auto s = mz_signal(classical_config(a, b, c));
    EXPECT_NEAR(s.amplitude, 1.0, 1e-12);
    EXPECT_NEAR(s.visibility, 1.0, 1e-12);
    EXPECT_NEAR(std::abs(wrap_phase(s.phase - (c - 2 * b + a))), 0.0, 1e-12);
    EXPECT_NEAR(s.imaginary_residual, 0.0, 1e-12);
  }
}

TEST(BranchFactor, FockLadderRolesVanish) {
  const PulseSpec p(kPi / 2, 3.0, 0.0, Fock{3});
  EXPECT_EQ(branch_factor(p, Slot::bs0, Branch::upper), complex{});
  EXPECT_EQ(branch_factor(p, Slot::mirror, Branch::upper), complex{});
  EXPECT_EQ(branch_factor(p, Slot::mirror, Branch::lower), complex{});
  EXPECT_EQ(branch_factor(p, Slot::bs2, Branch::lower), complex{});
  EXPECT_NEAR(branch_factor(p, Slot::bs0, Branch::lower).real(), std::cos(kPi / 4), 1e-15);
}

TEST(BranchFactor, ClassicalMirrorHasUnitTransition) {
  const PulseSpec p(kPi, 1.0, 0.0, Classical{});
  EXPECT_NEAR(std::abs(branch_factor(p, Slot::mirror, Branch::upper)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(branch_factor(p, Slot::mirror, Branch::lower)), 1.0, 1e-15);
}

TEST(BranchFactor, CoherentMatchesMatrixElements) {
  const PulseSpec p(1.1, 2.5, 0.0, Coherent(std::sqrt(2.5), 0.4));
  const auto ref = reference_pulse(p, 60);
  std::vector<oracle::cplx> psi = ref.psi;
  psi.resize(psi.size() + 3);
  for (int slot = 0; slot < 3; ++slot) {
    const auto m = oracle::branch_matrices(ref, slot, psi.size());
    const auto upper = oracle::expectation(m.upper, psi);
    const auto lower = oracle::expectation(m.lower, psi);
    EXPECT_NEAR(std::abs(branch_factor(p, static_cast<Slot>(slot), Branch::upper) - upper), 0.0, 1e-13) << slot;
    EXPECT_NEAR(std::abs(branch_factor(p, static_cast<Slot>(slot), Branch::lower) - lower), 0.0, 1e-13) << slot;
  }
  // bs0 upper written out as sum_n conj(c_{n-1}) c_n s_n
  oracle::cplx direct{};
  for (std::size_t n = 1; n < ref.psi.size(); ++n) direct += std::conj(ref.psi[n - 1]) * ref.psi[n] * ref.s(n);
  EXPECT_NEAR(std::abs(branch_factor(p, Slot::bs0, Branch::upper) - direct), 0.0, 1e-13);
}

TEST(MzOverlap, AnyFockPulseKillsTheOverlapExactly) {
  for (std::size_t slot = 0; slot < 3; ++slot) {
    for (std::size_t n : {1u, 2u, 5u}) {
      MzConfig c = coherent_family(2.0);
      c.pulses[slot] = PulseSpec(c.pulses[slot].theta_area, static_cast<double>(n), 0.0, Fock{n});
      EXPECT_EQ(mz_overlap(c), complex{}) << slot << " " << n;
      const auto s = mz_signal(c);
      EXPECT_EQ(s.visibility, 0.0);
      EXPECT_GT(s.amplitude, 0.0);
    }
  }
}

TEST(MzOverlap, FactorizesIntoSingleModeOverlaps) {
  PulseSettings settings;
  settings.couplings = {0.3, -1.2, 2.0};
  settings.state_phases = {0.1, 0.7, -0.4};
  const MzConfig c = coherent_family(3.0, settings);
  complex product = std::polar(2.0, coupling_phase(c));
  for (std::size_t l = 0; l < 3; ++l) product *= overlap_factor(c.pulses[l], static_cast<Slot>(l), c.tol);
  EXPECT_NEAR(std::abs(mz_overlap(c) - product), 0.0, 1e-12);
}

TEST(MzOverlap, CoherentSixMatchesMatricesAndTripleSum) {
  PulseSettings settings;
  settings.couplings = {0.2, 0.5, -0.3};
  settings.state_phases = {0.3, 0.1, 0.5};
  const MzConfig c = coherent_family(6.0, settings);
  const auto pulses = reference_pulses(c, 200);
  const auto triple = oracle::mz_triple_sum(pulses);
  EXPECT_NEAR(mz_amplitude(c), triple.amplitude, 1e-12);
  EXPECT_NEAR(std::abs(mz_overlap(c) - triple.overlap), 0.0, 1e-12);

  const auto small = reference_pulses(c, 70);
  const auto matrices = oracle::mz_by_matrices(small);
  EXPECT_NEAR(mz_amplitude(c), matrices.amplitude, 1e-12);
  EXPECT_NEAR(std::abs(mz_overlap(c) - matrices.overlap), 0.0, 1e-12);
}

TEST(MzAmplitude, GeneralAndTwoFockStatesMatchMatrices) {
  MzConfig c;
  c.pulses = {PulseSpec(1.3, 1.7, 0.2, General({complex{0.6}, complex{0.0, 0.48}, complex{0.64}})),
              PulseSpec(2.9, 4.0, -0.1, TwoFock(1, 3, 0.8, 0.6, 0.4)),
              PulseSpec(1.8, 2.0, 0.9, General({complex{0.0}, complex{0.8, 0.0}, complex{0.0, 0.6}}))};
  const auto ref = oracle::mz_by_matrices(reference_pulses(c, 6));
  EXPECT_NEAR(mz_amplitude(c), ref.amplitude, 1e-14);
  EXPECT_NEAR(std::abs(mz_overlap(c) - ref.overlap), 0.0, 1e-14);
}

TEST(MzSignal, VacuumIsDegenerate) {
  const auto s = mz_signal(coherent_family(0.0));
  EXPECT_TRUE(s.degenerate);
  EXPECT_EQ(s.amplitude, 0.0);
  EXPECT_EQ(s.visibility, 0.0);
  EXPECT_EQ(s.phase, 0.0);
  EXPECT_EQ(s.fringe_coefficient, complex{});
}

TEST(MzSignal, CoherentPhaseLawExample) {
  PulseSettings settings;
  settings.state_phases = {0.3, 0.1, 0.5};
  for (double nbar : {0.2, 2.0, 40.0}) {
    const auto s = mz_signal(coherent_family(nbar, settings));
    EXPECT_NEAR(s.phase, 0.6, 1e-12);
    EXPECT_NEAR(s.imaginary_residual, 0.0, 1e-12);
  }
}

TEST(MzSignal, TwoFockPhaseLawExampleUsesMirrorWeightOne) {
  PulseSettings settings;
  settings.state_phases = {0.3, 0.1, 0.5};
  const auto s = mz_signal(two_fock_family(3.0, settings));
  EXPECT_NEAR(s.phase, 0.7, 1e-12);
  EXPECT_NEAR(s.imaginary_residual, 0.0, 1e-12);
  EXPECT_GT(s.visibility, 0.0);
}

TEST(MzSignal, FringeCoefficientMatchesDecomposition) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-kPi, kPi), area(0.1, 2 * kPi), mean(0.05, 20.0);
  for (int i = 0; i < 40; ++i) {
    PulseSettings settings;
    for (std::size_t l = 0; l < 3; ++l) {
      settings.areas[l] = area(rng);
      settings.couplings[l] = angle(rng);
      settings.state_phases[l] = angle(rng);
    }
    const double nbar = mean(rng);
    for (const MzConfig& c : {coherent_family(nbar, settings), two_fock_family(nbar, settings)}) {
      const auto s = mz_signal(c);
      if (s.degenerate) continue;
      EXPECT_NEAR(std::abs(s.visibility * std::polar(1.0, s.phase) - s.fringe_coefficient), 0.0, 1e-12);
      EXPECT_LE(std::abs(s.visibility), 1.0 + 1e-12);
      EXPECT_GE(s.amplitude, 0.0);
      for (double phi = 0.0; phi < 2 * kPi; phi += 0.25) {
        EXPECT_GE(s.intensity(phi), -1e-12);
        EXPECT_LE(s.intensity(phi), 1.0 + 1e-12);
      }
    }
  }
}

TEST(MzSignal, GeneralStatesUseModulusAndArgument) {
  MzConfig c = coherent_family(1.5);
  const auto coherent = mz_signal(c);
  // same field as an explicit amplitude list
  const auto amplitudes = fock_amplitudes(c.pulses[0].state, 40);
  std::vector<complex> a = amplitudes.amplitudes;
  for (auto& x : a) x /= amplitudes.norm;
  c.pulses[0] = PulseSpec(c.pulses[0].theta_area, c.pulses[0].nbar, 0.0, General(a));
  const auto s = mz_signal(c);
  EXPECT_FALSE(s.canonical_phase);
  EXPECT_NEAR(s.amplitude, coherent.amplitude, 1e-12);
  EXPECT_NEAR(s.visibility, std::abs(coherent.visibility), 1e-12);
  EXPECT_NEAR(std::abs(std::polar(s.visibility, s.phase) - s.fringe_coefficient), 0.0, 1e-12);
}

TEST(TwoFockClosedForm, MatchesGeneralOverlapOnRandomConfigs) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-kPi, kPi), area(0.1, 2 * kPi), weight(0.05, 1.0);
  std::uniform_int_distribution<std::size_t> level(2, 30);
  constexpr std::array<std::size_t, 3> offsets = {1, 2, 1};
  for (int i = 0; i < 100; ++i) {
    MzConfig c;
    for (std::size_t l = 0; l < 3; ++l) {
      const std::size_t n = level(rng);
      const double g = weight(rng);
      c.pulses[l] = PulseSpec(area(rng), 0.5 + n * weight(rng), angle(rng),
                              TwoFock(n - offsets[l], n, g, std::sqrt(1 - g * g), angle(rng)));
    }
    const auto closed = mz_two_fock_closed_form(c);
    ASSERT_TRUE(closed.offsets_match);
    EXPECT_NEAR(std::abs(closed.overlap - mz_overlap(c) / 2.0), 0.0, 1e-12);
  }
}

TEST(TwoFockClosedForm, PureFockAndMismatchedOffsets) {
  MzConfig pure = two_fock_family(4.0);
  for (auto& p : pure.pulses) {
    auto t = std::get<TwoFock>(p.state);
    p.state = TwoFock(t.m, t.n, 1.0, 0.0, 0.0);
  }
  EXPECT_EQ(mz_two_fock_closed_form(pure).overlap, complex{});

  MzConfig shifted = two_fock_family(4.0);
  const auto t0 = std::get<TwoFock>(shifted.pulses[0].state);
  shifted.pulses[0].state = TwoFock::balanced(t0.n - 2, t0.n);
  const auto closed = mz_two_fock_closed_form(shifted);
  EXPECT_FALSE(closed.offsets_match);
  EXPECT_EQ(closed.overlap, complex{});
  EXPECT_NE(closed.diagnostic.find("OffsetMismatch"), std::string::npos);
  EXPECT_EQ(mz_overlap(shifted), complex{});

  EXPECT_THROW(mz_two_fock_closed_form(coherent_family(2.0)), Error);
}

TEST(TwoFockFamily, LevelsAndLargeMeanLimit) {
  EXPECT_EQ(two_fock_upper_level(0.5, 1), 1u);
  EXPECT_EQ(two_fock_upper_level(1.0, 2), 2u);
  EXPECT_EQ(two_fock_upper_level(4.0, 1), 5u);  // 4.5 rounds up
  EXPECT_EQ(two_fock_upper_level(8.0, 2), 9u);
  const MzConfig c = two_fock_family(4.5);
  EXPECT_NEAR(mean_photon_number(c.pulses[0].state), 4.5, 1e-12);
  EXPECT_NEAR(mean_photon_number(c.pulses[1].state), 9.0, 1e-12);
  EXPECT_NEAR(mz_signal(two_fock_family(1e4)).visibility, 0.125, 2e-3);
  EXPECT_NEAR(mz_signal(two_fock_family(1e6)).visibility, 0.125, 1e-6);
}

TEST(CoherentFamily, VisibilityLimitsAndSignChanges) {
  EXPECT_EQ(mz_signal(coherent_family(0.0)).visibility, 0.0);
  int sign_changes = 0;
  double previous = mz_signal(coherent_family(0.01)).visibility;
  for (int i = 1; i <= 400; ++i) {
    const double nbar = 0.01 * std::pow(100.0, i / 400.0);
    if (nbar >= 1.0) break;
    const double v = mz_signal(coherent_family(nbar)).visibility;
    if ((v > 0.0) != (previous > 0.0)) ++sign_changes;
    previous = v;
  }
  EXPECT_GE(sign_changes, 1);
  const double v_large = mz_signal(coherent_family(1e4)).visibility;
  EXPECT_GT(v_large, 0.99);
  EXPECT_LT(1.0 - v_large, 1e-3);
}

TEST(CoherentFamily, MonotoneAboveTen) {
  double previous = mz_signal(coherent_family(10.0)).visibility;
  for (int i = 1; i <= 120; ++i) {
    const double v = mz_signal(coherent_family(10.0 * std::pow(1000.0, i / 120.0))).visibility;
    EXPECT_GT(v, previous) << i;
    previous = v;
  }
}

TEST(Optimizer, FringeDepthStaysBelowAQuarter) {
  for (double nbar : {0.5, 1.0, 2.0, 5.0}) {
    const auto best = optimize_two_fock_visibility(nbar);
    EXPECT_LT(best.max_fringe_depth, 0.25) << nbar;
    EXPECT_LE(std::abs(best.visibility), 1.0);
    EXPECT_GT(best.evaluations, 48u * 48u * 48u);
  }
}

TEST(Optimizer, FrozenOptimumAtHalfPhoton) {
  const auto best = optimize_two_fock_visibility(0.5);
  EXPECT_NEAR(best.visibility, 0.42255009817850486, 1e-9);
  EXPECT_NEAR(best.amplitude * std::abs(best.visibility), best.fringe_depth, 1e-15);
  // the optimizer beats the default pulse areas
  EXPECT_GT(std::abs(best.visibility), std::abs(mz_signal(two_fock_family(0.5)).visibility));
}

TEST(Optimizer, RejectsTooFewPhotons) { EXPECT_THROW(optimize_two_fock_visibility(0.4), Error); }

}  // namespace
