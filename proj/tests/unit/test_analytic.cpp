#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gamma_qm/analytic.hpp"
#include "oracles.hpp"

namespace gqm {
namespace {

using std::numbers::pi;

TEST(Well, FrozenValuesAtHalfGamma) {
  const auto s = WellSpec::make(0.5, 1.0);
  EXPECT_NEAR(effective_length(s), test::kEffectiveLengthGamma05, 1e-15);
  EXPECT_NEAR(well_k_n(1, s), test::kWellK1Gamma05, 1e-14);
  EXPECT_NEAR(well_energy(1, s), test::kWellE1Gamma05, 1e-13);
}

TEST(Well, StandardSpectrumAtZeroGamma) {
  const auto s = WellSpec::make(0.0, 1.0);
  for (int n = 1; n <= 10; ++n) EXPECT_NEAR(well_energy(n, s), n * n * pi * pi / 2.0, 1e-12 * n * n);
  EXPECT_EQ(well_normalization(3, s), std::sqrt(2.0));
  EXPECT_EQ(well_normalization(1, WellSpec::make(0.0, 2.0)), 1.0);
}

TEST(Well, EnergyContinuousThroughZeroGamma) {
  const double e0 = well_energy(2, WellSpec::make(0.0, 1.0));
  EXPECT_NEAR(well_energy(2, WellSpec::make(1e-9, 1.0)), e0, 1e-7);
  EXPECT_NEAR(well_energy(2, WellSpec::make(-1e-9, 1.0)), e0, 1e-7);
}

TEST(Well, EnergyOrderingInGamma) {
  for (int n = 1; n <= 10; ++n) {
    EXPECT_LT(well_energy(n, WellSpec::make(-0.5, 1.0)), well_energy(n, WellSpec::make(0.0, 1.0)));
    EXPECT_LT(well_energy(n, WellSpec::make(0.0, 1.0)), well_energy(n, WellSpec::make(0.5, 1.0)));
  }
  for (int n = 1; n <= 3; ++n) {
    double prev = well_energy(n, WellSpec::make(-0.9, 1.0));
    for (int i = 1; i <= 290; ++i) {
      const double cur = well_energy(n, WellSpec::make(-0.9 + i * 0.01, 1.0));
      ASSERT_GT(cur, prev);
      prev = cur;
    }
  }
}

TEST(Well, NormalizationAgainstSimpsonOracle) {
  for (double g : {-0.9, -0.5, 0.5, 1.0, 2.0}) {
    const auto s = WellSpec::make(g, 1.0);
    for (int n : {1, 2, 5, 20}) {
      const double integral = test::simpson([&](double x) { return std::pow(well_value(n, s, x), 2); }, 0.0, 1.0, 200000);
      EXPECT_NEAR(integral, 1.0, 1e-10) << "g=" << g << " n=" << n;
    }
  }
}

TEST(Well, NormalizationPerturbationIsDetectable) {
  const auto s = WellSpec::make(0.5, 1.0);
  const double a = well_normalization(1, s);
  EXPECT_NEAR((1.01 * a) * (1.01 * a) / (a * a), 1.0201, 1e-12);
}

TEST(Well, NodeCount) {
  const auto s = WellSpec::make(1.0, 1.0);
  const auto g = Grid1D::uniform(0, 1, 5001);
  for (int n = 1; n <= 6; ++n) {
    const auto psi = well_wavefunction(n, s, g);
    int changes = 0;
    for (std::size_t i = 2; i + 1 < g.size(); ++i) {
      if (psi.amplitudes[i].real() * psi.amplitudes[i - 1].real() < 0) ++changes;
    }
    EXPECT_EQ(changes, n - 1);
  }
}

TEST(Well, VanishesAtWallsAndOutside) {
  const auto s = WellSpec::make(0.5, 1.0);
  EXPECT_EQ(well_value(2, s, 0.0), 0.0);
  EXPECT_EQ(well_value(2, s, 1.0), 0.0);
  EXPECT_EQ(well_value(2, s, 1.5), 0.0);
  EXPECT_THROW(well_value(0, s, 0.5), contract_error);
  EXPECT_THROW(well_wavefunction(1, s, Grid1D::uniform(0, 2, 11)), domain_error);
}

TEST(Well, MeanPositionFrozenValues) {
  struct Case {
    double g;
    int n;
    double expected;
  };
  for (const auto& c : {Case{0.5, 1, test::kMeanX1Gamma05}, Case{1.0, 1, test::kMeanX1Gamma1},
                        Case{-0.5, 1, test::kMeanX1GammaM05}, Case{2.0, 3, test::kMeanX3Gamma2},
                        Case{-0.9, 1, test::kMeanX1GammaM09}, Case{0.5, 2, test::kMeanX2Gamma05}}) {
    EXPECT_NEAR(well_mean_x(c.n, WellSpec::make(c.g, 1.0)), c.expected, 1e-14) << "g=" << c.g << " n=" << c.n;
  }
  EXPECT_EQ(well_mean_x(7, WellSpec::make(0.0, 1.0)), 0.5);
}

TEST(Well, MeanPositionAgainstSimpsonOracle) {
  for (double g : {-0.9, -0.5, 0.5, 1.0, 2.0}) {
    const auto s = WellSpec::make(g, 1.0);
    for (int n : {1, 4, 20}) {
      const double q = test::simpson([&](double x) { return x * std::pow(well_value(n, s, x), 2); }, 0.0, 1.0, 200000);
      EXPECT_NEAR(well_mean_x(n, s), q, 1e-10) << "g=" << g << " n=" << n;
    }
  }
}

TEST(Well, MeanPositionSymmetryAndHighNLimit) {
  // gamma -> -gamma/(1+gamma) mirrors the well, so <x> -> 1 - <x>.
  EXPECT_NEAR(test::kMeanX1Gamma1 + well_mean_x(1, WellSpec::make(-0.5, 1.0)), 1.0, 1e-14);
  for (double g : {-0.9, -0.5, 0.5, 1.0, 2.0}) EXPECT_LT(std::abs(well_mean_x(20, WellSpec::make(g, 1.0)) - 0.5), 0.01);
  EXPECT_LT(well_mean_x(1, WellSpec::make(0.5, 1.0)), 0.5);
  EXPECT_GT(well_mean_x(1, WellSpec::make(-0.5, 1.0)), 0.5);
}

TEST(Well, EigensolutionLabels) {
  const auto s = WellSpec::make(0.5, 1.0);
  const auto sol = well_eigensolution(s, 4, Grid1D::uniform(0, 1, 101));
  ASSERT_EQ(sol.energies.size(), 4u);
  EXPECT_EQ(sol.labels[3], 4);
  EXPECT_LT(sol.energies[0], sol.energies[1]);
}

TEST(Well2D, GroundStateShiftedTowardOrigin) {
  const auto s = WellSpec::make(1.0, 1.0);
  const auto g = Grid1D::uniform(0, 1, 1001);
  const auto m = well2d_density(1, 1, s, s, g, g);
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < m.nx; ++i)
    for (std::size_t j = 0; j < m.ny; ++j)
      if (m(i, j) > m(bi, bj)) bi = i, bj = j;
  EXPECT_LT(g[bi], 0.5);
  EXPECT_LT(g[bj], 0.5);
  // argmax of sin(k u): u = L'/2, x = (sqrt(1 + gamma L) - 1)/gamma
  EXPECT_NEAR(g[bi], std::sqrt(2.0) - 1.0, 1e-3);
}

TEST(Well2D, TotalProbability) {
  const auto s = WellSpec::make(1.0, 1.0);
  const auto g = Grid1D::uniform(0, 1, 201);
  for (auto [nx, ny] : {std::pair{1, 1}, {1, 2}, {2, 2}, {20, 20}}) {
    EXPECT_NEAR(trapezoid_2d(well2d_density(nx, ny, s, s, g, g), g, g), 1.0, 1e-6) << nx << "," << ny;
  }
}

TEST(Well2D, HighStateUniformOnNodeAlignedCells) {
  const auto s = WellSpec::make(1.0, 1.0);
  const auto g = Grid1D::uniform(0, 1, 201);
  const auto m = well2d_density(20, 20, s, s, g, g);
  const auto edges = nodal_cell_edges(20, 4, s, g);
  ASSERT_EQ(edges.size(), 6u);
  EXPECT_EQ(edges.front(), 0u);
  EXPECT_EQ(edges.back(), 200u);
  EXPECT_LT(coarse_grain_spread(m, g, g, edges, edges), 0.10);
}

TEST(Well2D, UniformXCellsAreNotUniform) {
  // Equal-width cells cut through lobes of different width; only nodal cells are fair.
  const auto s = WellSpec::make(1.0, 1.0);
  const auto g = Grid1D::uniform(0, 1, 201);
  const std::vector<std::size_t> edges{0, 40, 80, 120, 160, 200};
  EXPECT_GT(coarse_grain_spread(well2d_density(20, 20, s, s, g, g), g, g, edges, edges), 0.10);
  EXPECT_THROW(nodal_cell_edges(20, 3, s, g), contract_error);
  EXPECT_THROW(nodal_cell_edges(20, 1, s, Grid1D::uniform(0, 1, 11)), size_error);
}

TEST(FreeWave, EnergyAndFluxForAllGamma) {
  for (double g : {-0.5, 0.0, 0.5, 2.0}) {
    const GammaFrame f(g, 0.0, 1.5, 1.3, 0.7);
    const auto w = free_wave(2.5, -1, f);
    EXPECT_NEAR(w.energy(), 0.49 * 6.25 / 2.6, 1e-15);
    for (double x = 0.0; x <= 1.5; x += 0.125) {
      EXPECT_NEAR(w.flux(x), -0.7 * 2.5 / 1.3, 1e-13);
      EXPECT_NEAR(std::abs(w(x)), 1.0, 1e-15);
    }
  }
}

TEST(FreeWave, RejectsBadArguments) {
  const GammaFrame f(0.5, 0.0, 1.0);
  EXPECT_THROW(free_wave(-1.0, 1, f), contract_error);
  EXPECT_THROW(free_wave(1.0, 0, f), contract_error);
  EXPECT_THROW(free_wave(1.0, 1, f)(2.0), domain_error);
}

TEST(Barrier, HalfHeightOracle) {
  const auto b = BarrierSpec::make(0.0, 18.0, 1.0);
  EXPECT_NEAR(barrier_transmission(9.0, b), test::kBarrierTHalfV0, 1e-15);
  EXPECT_NEAR(barrier_transmission(9.0, b), 8.26e-4, 1e-6);
}

TEST(Barrier, ContinuousAcrossTopOfBarrier) {
  for (double g : {-0.5, 0.0, 0.5}) {
    const auto b = BarrierSpec::make(g, 18.0, 1.0);
    const double at = barrier_transmission(18.0, b);
    EXPECT_NEAR(barrier_transmission(18.0 * (1 + 1e-9), b), at, 1e-7);
    EXPECT_NEAR(barrier_transmission(18.0 * (1 - 1e-9), b), at, 1e-7);
  }
}

TEST(Barrier, ResonancesAreTransparent) {
  for (double g : {-0.5, 0.0, 0.5}) {
    const auto b = BarrierSpec::make(g, 18.0, 1.0);
    for (int n = 1; n <= 3; ++n) {
      const double e = barrier_resonance_energy(n, b);
      const double q = std::sqrt(2.0 * (e - 18.0));
      EXPECT_NEAR(q * effective_width(b), n * pi, 1e-12);
      EXPECT_NEAR(barrier_transmission(e, b), 1.0, 1e-14);
    }
  }
}

TEST(Barrier, ResonanceOrderingFollowsEffectiveWidth) {
  const double r_neg = barrier_resonance_energy(1, BarrierSpec::make(-0.5, 18.0, 1.0)) / 18.0;
  const double r_0 = barrier_resonance_energy(1, BarrierSpec::make(0.0, 18.0, 1.0)) / 18.0;
  const double r_pos = barrier_resonance_energy(1, BarrierSpec::make(0.5, 18.0, 1.0)) / 18.0;
  EXPECT_LT(r_neg, r_0);
  EXPECT_LT(r_0, r_pos);
  EXPECT_NEAR(r_0, 1.0 + pi * pi / 36.0, 1e-14);
}

TEST(Barrier, TunnelingIncreasesWithGamma) {
  for (double ratio : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double prev = 0.0;
    for (double g = -0.5; g <= 0.5 + 1e-12; g += 0.05) {
      const double t = barrier_transmission(ratio * 18.0, BarrierSpec::make(g, 18.0, 1.0));
      ASSERT_GT(t, prev) << "ratio=" << ratio << " g=" << g;
      prev = t;
    }
  }
}

TEST(Barrier, CoefficientsMatchClosedFormAndConserveFlux) {
  test::Sampler s(3);
  for (int trial = 0; trial < 50; ++trial) {
    const double g = s.uniform(-0.5, 0.5);
    const double ratio = s.uniform(0.01, 4.0);
    const auto b = BarrierSpec::make(g, 18.0, 1.0);
    const auto c = barrier_coefficients(ratio * 18.0, b);
    const double t = std::norm(c.t);
    EXPECT_NEAR(t, barrier_transmission(ratio * 18.0, b), 1e-10) << "g=" << g << " ratio=" << ratio;
    EXPECT_NEAR(t + std::norm(c.r), 1.0, 1e-10);
  }
  EXPECT_THROW(barrier_coefficients(18.0, BarrierSpec::make(0.0, 18.0, 1.0)), numeric_error);
}

TEST(Barrier, CurveAndValidation) {
  const auto b = BarrierSpec::make(0.5, 18.0, 1.0);
  const std::vector<double> ratios{0.5, 1.0, 2.0};
  const auto c = transmission_curve(b, ratios);
  ASSERT_EQ(c.T.size(), 3u);
  EXPECT_EQ(c.T[1], barrier_transmission(18.0, b));
  EXPECT_THROW(barrier_transmission(0.0, b), contract_error);
  EXPECT_THROW(BarrierSpec::make(0.0, -1.0, 1.0), contract_error);
  EXPECT_THROW(BarrierSpec::make(-2.0, 1.0, 1.0), domain_error);
}

}  // namespace
}  // namespace gqm
