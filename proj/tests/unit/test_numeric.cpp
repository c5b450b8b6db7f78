#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gamma_qm/numeric.hpp"
#include "oracles.hpp"

namespace gqm {
namespace {

using std::numbers::pi;

TEST(Potential, ValuesAndBox) {
  const GammaFrame f(0.5, -1.0, 3.0);
  const auto well = PotentialSpec::infinite_well(1.0, f);
  EXPECT_EQ(well.value(0.5), 0.0);
  EXPECT_TRUE(std::isinf(well.value(1.5)));
  EXPECT_EQ(well.box().second, 1.0);
  const auto bar = PotentialSpec::barrier(18.0, 1.0, f);
  EXPECT_EQ(bar.value(0.5), 18.0);
  EXPECT_EQ(bar.value(2.0), 0.0);
  EXPECT_EQ(bar.box().first, -1.0);
  const auto tab = PotentialSpec::tabulated({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0}, f);
  EXPECT_DOUBLE_EQ(tab.value(0.25), 0.5);
  EXPECT_DOUBLE_EQ(tab.value(2.0), 0.0);
  EXPECT_THROW(tab.value(2.5), contract_error);
  EXPECT_THROW(PotentialSpec::tabulated({0.0, 0.0}, {1.0, 1.0}, f), contract_error);
  EXPECT_THROW(PotentialSpec::infinite_well(5.0, f), domain_error);
}

TEST(BoundStates, RichardsonSpectrumMatchesClosedForm) {
  for (double g : {-0.5, 0.0, 0.5}) {
    const auto spec = WellSpec::make(g, 1.0);
    const auto sol = solve_bound_states(PotentialSpec::infinite_well(spec), 10, 4000, {.richardson = true});
    for (int n = 1; n <= 10; ++n) {
      const double exact = well_energy(n, spec);
      EXPECT_LT(std::abs(sol.energies[n - 1] - exact) / exact, 1e-6) << "g=" << g << " n=" << n;
    }
  }
}

TEST(BoundStates, RawEnergiesConvergeSecondOrderFromAbove) {
  const auto spec = WellSpec::make(0.5, 1.0);
  const auto pot = PotentialSpec::infinite_well(spec);
  const auto c = solve_bound_states(pot, 10, 1001);
  const auto f = solve_bound_states(pot, 10, 2001);
  for (int n = 1; n <= 10; ++n) {
    const double exact = well_energy(n, spec);
    // The three-point Dirichlet Laplacian underestimates each eigenvalue.
    const double ec = exact - c.raw_energies[n - 1];
    const double ef = exact - f.raw_energies[n - 1];
    EXPECT_GT(ef, 0.0);
    EXPECT_LT(ef, ec);
    EXPECT_NEAR(std::log2(ec / ef), 2.0, 0.05) << "n=" << n;
  }
}

TEST(BoundStates, BackendsAgree) {
  const auto spec = WellSpec::make(0.5, 1.0);
  const auto pot = PotentialSpec::infinite_well(spec);
  const auto u = solve_bound_states(pot, 5, 4000, {.richardson = true});
  const auto x = solve_bound_states(pot, 5, 4000, {.backend = Discretization::x_space, .richardson = true});
  for (std::size_t k = 0; k < 5; ++k) EXPECT_LT(std::abs(u.energies[k] - x.energies[k]) / u.energies[k], 1e-6);
}

TEST(BoundStates, StatesOverlapClosedForm) {
  for (double g : {-0.5, 0.5, 1.0}) {
    const auto spec = WellSpec::make(g, 1.0);
    for (auto backend : {Discretization::u_space, Discretization::x_space}) {
      const auto sol = solve_bound_states(PotentialSpec::infinite_well(spec), 4, 2001, {.backend = backend});
      for (int n = 1; n <= 4; ++n) {
        const auto& psi = sol.states[n - 1];
        const auto exact = well_wavefunction(n, spec, psi.grid);
        std::vector<double> prod(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) prod[i] = psi.amplitudes[i].real() * exact.amplitudes[i].real();
        EXPECT_NEAR(quadrature(prod, psi.grid, NormMeasure::standard, spec.frame), 1.0, 1e-5) << "g=" << g << " n=" << n;
        EXPECT_NEAR(expectations(psi, spec.frame).mean_x, well_mean_x(n, spec), 1e-5);
      }
    }
  }
}

TEST(BoundStates, ResolutionGuard) {
  const auto pot = PotentialSpec::infinite_well(WellSpec::make(0.5, 1.0));
  EXPECT_THROW(solve_bound_states(pot, 10, 100), size_error);
  EXPECT_NO_THROW(solve_bound_states(pot, 10, 101));
  EXPECT_THROW(solve_bound_states(pot, 0, 101), contract_error);
  EXPECT_THROW(solve_bound_states(pot, 10, 101, {.richardson = true}), size_error);
}

TEST(TransferMatrix, SlabDeterminantIsOne) {
  for (double e : {0.5, 18.0, 18.0 + 1e-12, 40.0}) {
    const auto m = slab_matrix(e, 18.0, 0.8, 1.0, 1.0);
    EXPECT_NEAR(std::abs(determinant(m) - 1.0), 0.0, 1e-12) << "E=" << e;
  }
}

TEST(TransferMatrix, MatchesClosedFormAcrossSweep) {
  for (double g : {-0.5, 0.0, 0.5}) {
    const auto b = BarrierSpec::make(g, 18.0, 1.0);
    for (int i = 1; i <= 400; ++i) {
      const double e = 18.0 * i / 100.0;
      const auto s = transfer_matrix_scattering(e, b);
      ASSERT_NEAR(s.T, barrier_transmission(e, b), 1e-10) << "g=" << g << " E=" << e;
      ASSERT_NEAR(s.T + s.R, 1.0, 1e-10);
    }
  }
}

TEST(TransferMatrix, AmplitudesMatchMatchingSolution) {
  const auto b = BarrierSpec::make(0.5, 18.0, 1.0);
  for (double e : {5.0, 27.0}) {
    const auto s = transfer_matrix_scattering(e, b);
    const auto c = barrier_coefficients(e, b);
    EXPECT_LT(std::abs(s.t - c.t), 1e-10);
    EXPECT_LT(std::abs(s.r - c.r), 1e-10);
  }
}

TEST(TransferMatrix, SplitSlabsComposeAndEmptyStackIsTransparent) {
  const std::vector<Slab> one{{0.8, 18.0}};
  const std::vector<Slab> three{{0.3, 18.0}, {0.2, 18.0}, {0.3, 18.0}};
  const auto a = transfer_matrix_scattering(12.0, one, 1.0, 1.0);
  const auto b = transfer_matrix_scattering(12.0, three, 1.0, 1.0);
  EXPECT_LT(std::abs(a.t - b.t), 1e-12);
  EXPECT_NEAR(transfer_matrix_scattering(3.0, std::vector<Slab>{}, 1.0, 1.0).T, 1.0, 1e-15);
  EXPECT_THROW(transfer_matrix_scattering(-1.0, one, 1.0, 1.0), contract_error);
}

TEST(TransferMatrix, ResonanceFromNumericRoot) {
  // Bisect dT/dE sign on T near the predicted resonance; T must hit 1 at q a' = pi.
  const auto b = BarrierSpec::make(0.5, 18.0, 1.0);
  const double e1 = barrier_resonance_energy(1, b);
  EXPECT_NEAR(transfer_matrix_transmission(e1, b), 1.0, 1e-12);
  EXPECT_LT(transfer_matrix_transmission(e1 * 0.99, b), 1.0);
  EXPECT_LT(transfer_matrix_transmission(e1 * 1.01, b), 1.0);
}

struct PacketSetup {
  double gamma;
  double x_hi = 40.0;
  double x0 = 8.0;
  double sigma = 1.0;
  double k0 = 1.0;
};

PropagationResult run_packet(const PacketSetup& s, std::size_t n, double dt, std::size_t steps) {
  const GammaFrame f(s.gamma, 0.0, s.x_hi);
  const auto grid = Grid1D::uniform_in_u(s.gamma, 0.0, s.x_hi, n);
  const auto psi = gaussian_packet(grid, f, s.x0, s.sigma, s.k0);
  return time_evolve(psi, PotentialSpec::null(f), dt, steps);
}

TEST(Evolve, DeformedNormConserved) {
  const auto r = run_packet({.gamma = 0.5}, 4001, 2e-4, 1000);
  EXPECT_LT(r.max_deformed_drift, 1e-10);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.snapshots.size(), 11u);
  EXPECT_DOUBLE_EQ(r.times.back(), 0.2);
}

TEST(Evolve, StandardNormDriftFollowsFlux) {
  const auto r = run_packet({.gamma = 0.5}, 4001, 2e-4, 1000);
  const double drift = r.standard_norms.back() - r.standard_norms.front();
  EXPECT_GT(std::abs(drift), 1e-3);
  EXPECT_NEAR(r.standard_norms.back(), r.flux_predicted_standard_norms.back(), 1e-3 * std::abs(drift));
}

TEST(Evolve, StandardGaussianAtZeroGamma) {
  const PacketSetup s{.gamma = 0.0, .x_hi = 40.0, .x0 = 10.0, .sigma = 1.0, .k0 = 2.0};
  const double t = 1.0;
  const auto r = run_packet(s, 4001, 1e-3, 1000);
  const GammaFrame f(0.0, 0.0, 40.0);
  const auto e0 = expectations(r.snapshots.front(), f);
  const auto e1 = expectations(r.snapshots.back(), f);
  EXPECT_NEAR(e1.mean_x - e0.mean_x, s.k0 * t, 0.01 * s.k0 * t);
  const double sigma2 = s.sigma * s.sigma + std::pow(t / (2.0 * s.sigma), 2);
  EXPECT_NEAR(e1.var_x, sigma2, 0.01 * sigma2);
}

TEST(Evolve, ContinuityResidualSecondOrder) {
  auto worst = [](std::size_t n) {
    const auto r = run_packet({.gamma = 0.5}, n, 1e-5, 200);
    return *std::max_element(r.continuity_residuals.begin(), r.continuity_residuals.end());
  };
  const double r1 = worst(2001), r2 = worst(4001);
  EXPECT_NEAR(std::log2(r1 / r2), 2.0, 0.2);
}

TEST(Evolve, WarnsAndClampsWallAmplitude) {
  const GammaFrame f(0.5, 0.0, 10.0);
  const auto grid = Grid1D::uniform_in_u(0.5, 0.0, 10.0, 401);
  const auto psi = gaussian_packet(grid, f, 0.0, 1.0, 0.0);
  const auto r = time_evolve(psi, PotentialSpec::null(f), 1e-3, 10);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.snapshots.front().amplitudes.front(), complex(0.0, 0.0));
  EXPECT_LT(r.max_deformed_drift, 1e-12);
}

TEST(Evolve, RejectsBadInput) {
  const GammaFrame f(0.5, 0.0, 10.0);
  const auto pot = PotentialSpec::null(f);
  const auto x_uniform = gaussian_packet(Grid1D::uniform(0.0, 10.0, 101), f, 5.0, 1.0, 0.0);
  EXPECT_THROW(time_evolve(x_uniform, pot, 1e-3, 10), contract_error);
  const auto ok = gaussian_packet(Grid1D::uniform_in_u(0.5, 0.0, 10.0, 101), f, 5.0, 1.0, 0.0);
  EXPECT_THROW(time_evolve(ok, pot, 0.0, 10), contract_error);
  EXPECT_THROW(time_evolve(ok, PotentialSpec::infinite_well(5.0, f), 1e-3, 10), contract_error);
}

}  // namespace
}  // namespace gqm
