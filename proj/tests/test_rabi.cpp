#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qlai/rabi.hpp"

namespace {

using namespace qlai;
constexpr double kPi = std::numbers::pi;

TEST(Rabi, ClassicalValues) {
  EXPECT_EQ(pg_classical(0.0), 1.0);
  EXPECT_NEAR(pg_classical(kPi), 0.0, 1e-30);
  EXPECT_NEAR(pg_classical(kPi / 2), 0.5, 1e-15);
}

TEST(Rabi, FockValues) {
  for (double theta : {0.3, kPi / 2, 2.9, 11.0}) EXPECT_NEAR(pg_fock(theta, 7, 7.0), pg_classical(theta), 1e-15);
  EXPECT_EQ(pg_fock(5.0, 0, 3.0), 1.0);
  EXPECT_NEAR(pg_fock(kPi, 12, 3.0), 1.0, 1e-15);
  EXPECT_THROW(pg_fock(1.0, 1, 0.0), Error);
}

TEST(Rabi, CoherentTrivialValues) {
  EXPECT_NEAR(pg_coherent(0.0, 6.0, 1e-12), 1.0, 1e-12);
  EXPECT_EQ(pg_coherent(3.3, 0.0, 1e-12), 1.0);
}

TEST(Rabi, CoherentMatchesLargeCutoffSum) {
  double reference = 0.0;
  for (int n = 0; n <= 200; ++n) {
    const double c = std::cos(0.5 * kPi * std::sqrt(n / 6.0));
    reference += oracle::poisson(n, 6.0) * c * c;
  }
  EXPECT_NEAR(pg_coherent(kPi, 6.0, 1e-12), reference, 1e-12);
}

TEST(Rabi, ApproximationValues) {
  EXPECT_EQ(pg_coherent_approx(0.0, 3.0), 1.0);
  EXPECT_NEAR(pg_coherent_approx(kPi, 100.0), 0.5 * (1.0 - std::exp(-kPi * kPi / 800.0)), 1e-15);
  const double theta = 40.0;
  const double damping = std::exp(-theta * theta / 8.0);
  EXPECT_NEAR(pg_coherent_approx(theta, 1.0), 0.5, damping);
  EXPECT_THROW(pg_coherent_approx(1.0, 0.0), Error);
}

TEST(Rabi, RevivalAroundFourPiNbar) {
  double peak = 0.0;
  for (double theta = 0.8 * 24.0 * kPi; theta <= 1.2 * 24.0 * kPi; theta += 0.01) {
    peak = std::max(peak, std::abs(pg_coherent(theta, 6.0, 1e-12) - 0.5));
  }
  EXPECT_GT(peak, 0.15);
}

TEST(Rabi, CollapseDeepInsideTheQuietRegion) {
  // The quiet stretch for nbar = 6 sits between the initial dephasing and the
  // onset of the revival; it does not reach out to 18 pi.
  double worst = 0.0;
  for (double theta = 6.0 * kPi; theta <= 12.0 * kPi; theta += 0.01) {
    worst = std::max(worst, std::abs(pg_coherent(theta, 6.0, 1e-12) - 0.5));
  }
  EXPECT_LT(worst, 0.05);
}

TEST(Rabi, ApproximationTracksCollapseAtLargeMean) {
  for (double theta = 0.0; theta <= 4.0 * kPi; theta += 0.005) {
    EXPECT_LT(std::abs(pg_coherent(theta, 100.0, 1e-12) - pg_coherent_approx(theta, 100.0)), 0.01) << theta;
  }
}

TEST(Rabi, RabiLimitAtLargeMean) { EXPECT_LT(pg_coherent(kPi, 1e6, 1e-12), 1e-3); }

TEST(Rabi, CurveStaysInUnitInterval) {
  std::vector<double> thetas;
  for (int i = 0; i <= 400; ++i) thetas.push_back(0.3 * i);
  const auto curve = rabi_curve(thetas, 6.0, 1e-12);
  ASSERT_EQ(curve.pg_values.size(), thetas.size());
  ASSERT_EQ(curve.pg_approx.size(), thetas.size());
  for (double p : curve.pg_values) {
    EXPECT_GE(p, -1e-12);
    EXPECT_LE(p, 1.0 + 1e-12);
  }
  EXPECT_TRUE(rabi_curve(thetas, 0.0, 1e-12).pg_approx.empty());
}

}  // namespace
