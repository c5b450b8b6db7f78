#pragma once

// The acceptance suite: ten checks, each comparing the numerical engine with
// a closed form, an exact identity, or a qualitative ordering.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "gamma_qm/analytic.hpp"
#include "gamma_qm/numeric.hpp"
#include "gamma_qm/operators.hpp"

namespace gqm::verify {

struct Options {
  /// Smaller grids and sweeps; all ten checks still run.
  bool quick = false;
  /// Multiplies A_n in the normalization check. 1.0 is the honest run; anything
  /// else exists to prove the suite notices.
  double normalization_fault = 1.0;
  /// Grid for the spectrum check.
  std::size_t grid = 4000;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Report {
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

/// Points per axis for the 2D density maps, shared with the well2d command.
inline constexpr std::size_t kDensityGrid = 201;

namespace detail {

inline std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

/// Accumulates pass/fail and a short human summary.
struct Tally {
  bool ok = true;
  std::string text;
  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!cond || text.size() < 400) {
      if (!text.empty()) text += "; ";
      text += (cond ? "" : "FAIL ") + what;
    }
  }
};

inline double observed_order(double coarse_err, double fine_err, double refinement) {
  return std::log(coarse_err / fine_err) / std::log(refinement);
}

inline Wavefunction1D gaussian(const Grid1D& g, double x0, double s) {
  return Wavefunction1D::sample(g, [=](double x) { return complex(std::exp(-(x - x0) * (x - x0) / (2 * s * s)), 0.0); });
}

}  // namespace detail

inline const std::vector<double>& spectrum_gammas() {
  static const std::vector<double> g{-0.5, 0.0, 0.5};
  return g;
}

inline const std::vector<double>& mean_position_gammas() {
  static const std::vector<double> g{-0.9, -0.5, 0.0, 0.5, 1.0, 2.0};
  return g;
}

// 1. Numeric spectrum vs closed form, plus second-order convergence of the raw scheme.
inline CheckResult check_spectrum(const Options& o) {
  detail::Tally t;
  double worst = 0.0, order_lo = 1e9, order_hi = -1e9;
  for (double g : spectrum_gammas()) {
    const auto spec = WellSpec::make(g, 1.0);
    const auto pot = PotentialSpec::infinite_well(spec);
    const auto sol = solve_bound_states(pot, 10, o.grid, {.richardson = true});
    const auto c = solve_bound_states(pot, 10, 1001);
    const auto f = solve_bound_states(pot, 10, 2001);
    for (int n = 1; n <= 10; ++n) {
      const double exact = well_energy(n, spec);
      worst = std::max(worst, std::abs(sol.energies[n - 1] - exact) / exact);
      const double p = std::log2((exact - c.raw_energies[n - 1]) / (exact - f.raw_energies[n - 1]));
      order_lo = std::min(order_lo, p);
      order_hi = std::max(order_hi, p);
    }
  }
  t.require(worst < 1e-6, "max rel err " + detail::fmt("%.2e", worst));
  t.require(order_lo > 1.8 && order_hi < 2.2,
            "order in [" + detail::fmt("%.3f", order_lo) + ", " + detail::fmt("%.3f", order_hi) + "]");
  return {1, "spectrum exactness", t.ok, t.text};
}

// 2. Energy ordering in gamma, on the same numbers cmd_well1d emits.
inline CheckResult check_energy_ordering(const Options& o) {
  detail::Tally t;
  bool ordered = true;
  for (int n = 1; n <= 10; ++n) {
    const double a = well_energy(n, WellSpec::make(-0.5, 1.0));
    const double b = well_energy(n, WellSpec::make(0.0, 1.0));
    const double c = well_energy(n, WellSpec::make(0.5, 1.0));
    ordered = ordered && a < b && b < c;
  }
  t.require(ordered, "E_n(-0.5) < E_n(0) < E_n(0.5) for n <= 10");
  const auto pot_grid = o.quick ? std::size_t{501} : std::size_t{2001};
  bool numeric_ordered = true;
  for (int n = 1; n <= 10; ++n) {
    double prev = -1.0;
    for (double g : spectrum_gammas()) {
      const auto sol = solve_bound_states(PotentialSpec::infinite_well(WellSpec::make(g, 1.0)), 10, pot_grid);
      numeric_ordered = numeric_ordered && sol.energies[n - 1] > prev;
      prev = sol.energies[n - 1];
    }
  }
  t.require(numeric_ordered, "numeric columns ordered");
  const int steps = o.quick ? 290 : 2900;
  bool increasing = true;
  for (int n = 1; n <= 3; ++n) {
    double prev = well_energy(n, WellSpec::make(-0.9, 1.0));
    for (int i = 1; i <= steps; ++i) {
      const double cur = well_energy(n, WellSpec::make(-0.9 + 2.9 * i / steps, 1.0));
      increasing = increasing && cur > prev;
      prev = cur;
    }
  }
  t.require(increasing, "E_n strictly increasing on gamma in [-0.9, 2], n = 1..3");
  return {2, "energy ordering", t.ok, t.text};
}

// 3. Closed-form <x> against quadrature over the normalized eigenfunction.
inline CheckResult check_mean_position(const Options& o) {
  detail::Tally t;
  const std::size_t n_grid = o.quick ? 4001 : 8001;
  double worst = 0.0, center = 0.0, high_n = 0.0;
  for (double g : mean_position_gammas()) {
    const auto spec = WellSpec::make(g, 1.0);
    const auto grid = Grid1D::uniform_in_u(g, 0.0, 1.0, n_grid);
    for (int n = 1; n <= 20; ++n) {
      const auto psi = normalized(well_wavefunction(n, spec, grid), spec.frame);
      const double q = expectations(psi, spec.frame).mean_x;
      const double c = well_mean_x(n, spec);
      worst = std::max(worst, std::abs(q - c) / c);
      if (g == 0.0) center = std::max({center, std::abs(c - 0.5), std::abs(q - 0.5)});
      if (n == 20) high_n = std::max(high_n, std::abs(c - 0.5));
    }
  }
  t.require(worst < 1e-6, "max rel err " + detail::fmt("%.2e", worst));
  t.require(center < 1e-12, "|<x>(gamma=0) - L/2| " + detail::fmt("%.1e", center));
  t.require(high_n < 0.01, "|<x>(n=20) - 1/2| " + detail::fmt("%.2e", high_n));
  return {3, "mean position", t.ok, t.text};
}

// 4. Unit norm of the closed-form eigenfunctions.
inline CheckResult check_normalization(const Options& o) {
  detail::Tally t;
  const std::size_t n_grid = o.quick ? 4001 : 8001;
  double worst = 0.0;
  for (double g : mean_position_gammas()) {
    const auto spec = WellSpec::make(g, 1.0);
    const auto grid = Grid1D::uniform(0.0, 1.0, n_grid);
    for (int n = 1; n <= 20; ++n) {
      auto psi = well_wavefunction(n, spec, grid);
      for (auto& a : psi.amplitudes) a *= o.normalization_fault;
      worst = std::max(worst, std::abs(norm_squared(psi, spec.frame) - 1.0));
    }
  }
  t.require(worst < 1e-8, "max |norm - 1| " + detail::fmt("%.2e", worst));
  bool exact = true;
  for (double L : {0.5, 1.0, 2.0, 3.0})
    for (int n = 1; n <= 5; ++n) exact = exact && well_normalization(n, WellSpec::make(0.0, L)) == std::sqrt(2.0 / L);
  t.require(exact, "A_n(gamma=0) == sqrt(2/L)");
  return {4, "normalization", t.ok, t.text};
}

// 5. Barrier transmission: transfer matrix vs closed form, resonance, tunneling trend, oracle value.
inline CheckResult check_barrier(const Options& o) {
  detail::Tally t;
  const double v0 = 18.0;
  const int samples = o.quick ? 400 : 4000;
  double worst = 0.0;
  for (double g : spectrum_gammas()) {
    const auto b = BarrierSpec::make(g, v0, 1.0);
    for (int i = 1; i <= samples; ++i) {
      const double e = 4.0 * v0 * i / samples;
      worst = std::max(worst, std::abs(transfer_matrix_transmission(e, b) - barrier_transmission(e, b)));
    }
  }
  t.require(worst < 1e-10, "max |T_tm - T_cf| " + detail::fmt("%.1e", worst));

  // First zero of the slab's m12 = sin(q a')/q above V0, found by bisection on the transfer matrix.
  double res_err = 0.0;
  for (double g : spectrum_gammas()) {
    const auto b = BarrierSpec::make(g, v0, 1.0);
    const double ap = effective_width(b);
    auto m12 = [&](double e) { return slab_matrix(e, v0, ap, 1.0, 1.0)[0][1].real(); };
    double lo = v0 * (1.0 + 1e-9), hi = lo;
    while (m12(hi) > 0.0) hi += 0.01 * v0;
    lo = hi - 0.01 * v0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (m12(mid) > 0.0 ? lo : hi) = mid;
    }
    const double e = 0.5 * (lo + hi);
    res_err = std::max({res_err, std::abs(std::sqrt(2.0 * (e - v0)) * ap - std::numbers::pi),
                        std::abs(transfer_matrix_transmission(e, b) - 1.0)});
  }
  t.require(res_err < 1e-8, "resonance |q a' - pi| " + detail::fmt("%.1e", res_err));

  bool tunneling = true;
  for (double ratio : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    double prev = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double tt = transfer_matrix_transmission(ratio * v0, BarrierSpec::make(-0.5 + 0.05 * i, v0, 1.0));
      tunneling = tunneling && tt > prev;
      prev = tt;
    }
  }
  t.require(tunneling, "tunneling T increasing in gamma");
  const double half = transfer_matrix_transmission(0.5 * v0, BarrierSpec::make(0.0, v0, 1.0));
  t.require(std::abs(half - 8.26e-4) <= 1e-6, "T(gamma=0, V0/2) " + detail::fmt("%.6e", half));
  return {5, "barrier transmission", t.ok, t.text};
}

// 6. Two-dimensional densities at gamma = 1.
inline CheckResult check_density_2d(const Options&) {
  detail::Tally t;
  const auto s = WellSpec::make(1.0, 1.0);
  const auto g = Grid1D::uniform(0.0, 1.0, kDensityGrid);
  const auto ground = well2d_density(1, 1, s, s, g, g);
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < ground.nx; ++i)
    for (std::size_t j = 0; j < ground.ny; ++j)
      if (ground(i, j) > ground(bi, bj)) bi = i, bj = j;
  t.require(g[bi] < 0.5 && g[bj] < 0.5, "ground argmax (" + detail::fmt("%.4f", g[bi]) + ", " + detail::fmt("%.4f", g[bj]) + ")");

  double worst = 0.0;
  for (auto [nx, ny] : {std::pair{1, 1}, {1, 2}, {2, 2}, {20, 20}}) {
    worst = std::max(worst, std::abs(trapezoid_2d(well2d_density(nx, ny, s, s, g, g), g, g) - 1.0));
  }
  t.require(worst < 1e-6, "max |P - 1| " + detail::fmt("%.1e", worst));

  // (20,20) coarse-grained on 5x5 cells whose edges follow every fourth nodal line.
  const auto edges = nodal_cell_edges(20, 4, s, g);
  const double spread = coarse_grain_spread(well2d_density(20, 20, s, s, g, g), g, g, edges, edges);
  t.require(spread < 0.10, "(20,20) interior cell spread " + detail::fmt("%.2e", spread));
  return {6, "2D densities", t.ok, t.text};
}

// 7. Commutator and kinetic-factorization residuals converge at second order.
inline CheckResult check_operator_identities(const Options&) {
  detail::Tally t;
  for (double g : {-0.4, 0.0, 0.5}) {
    const GammaFrame f(g, 0.0, 2.0);
    const auto c1 = Grid1D::uniform(0.0, 2.0, 200), c2 = Grid1D::uniform(0.0, 2.0, 400);
    const double r1 = commutator_residual(detail::gaussian(c1, 1.0, 0.2), f);
    const double r2 = commutator_residual(detail::gaussian(c2, 1.0, 0.2), f);
    const double pc = detail::observed_order(r1, r2, 399.0 / 199.0);
    t.require(std::abs(pc - 2.0) <= 0.2, "commutator order(g=" + detail::fmt("%g", g) + ") " + detail::fmt("%.3f", pc));

    auto kin = [&](const Grid1D& grid) {
      const auto psi = detail::gaussian(grid, 1.0, 0.2);
      const auto a = kinetic_apply_factored(psi, f);
      const auto b = kinetic_apply_expanded(psi, f);
      double m = 0.0;
      for (std::size_t i = 2; i + 2 < grid.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
      return m;
    };
    const double pk = detail::observed_order(kin(c1), kin(c2), 399.0 / 199.0);
    t.require(std::abs(pk - 2.0) <= 0.2, "kinetic order(g=" + detail::fmt("%g", g) + ") " + detail::fmt("%.3f", pk));
  }
  return {7, "operator identities", t.ok, t.text};
}

// 8. Deformed-norm conservation, continuity residual order, free-wave flux.
inline CheckResult check_continuity(const Options& o) {
  detail::Tally t;
  const double g = 0.5, x_hi = 40.0;
  const GammaFrame f(g, 0.0, x_hi);
  const auto pot = PotentialSpec::null(f);
  auto packet = [&](std::size_t n) { return gaussian_packet(Grid1D::uniform_in_u(g, 0.0, x_hi, n), f, 8.0, 1.0, 1.0); };

  const auto run = time_evolve(packet(o.quick ? 2001 : 4001), pot, 2e-4, 1000);
  t.require(run.max_deformed_drift < 1e-10, "deformed-norm drift " + detail::fmt("%.1e", run.max_deformed_drift));
  const double std_drift = run.standard_norms.back() - run.standard_norms.front();
  const double flux_gap = std::abs(run.standard_norms.back() - run.flux_predicted_standard_norms.back());
  t.require(flux_gap < 1e-3 * std::abs(std_drift), "standard-norm change " + detail::fmt("%.3e", std_drift) +
                                                        " vs flux prediction gap " + detail::fmt("%.1e", flux_gap));

  // Refine h and dt together so both error terms shrink by four.
  auto worst = [&](std::size_t n, double dt, std::size_t steps) {
    const auto r = time_evolve(packet(n), pot, dt, steps);
    return *std::max_element(r.continuity_residuals.begin(), r.continuity_residuals.end());
  };
  const double w1 = worst(1001, 4e-5, 50), w2 = worst(2001, 2e-5, 100);
  const double p = std::log2(w1 / w2);
  t.require(std::abs(p - 2.0) <= 0.2, "continuity order " + detail::fmt("%.3f", p));

  double flux_err = 0.0;
  for (double gg : {-0.5, 0.0, 0.5, 1.0}) {
    const GammaFrame ff(gg, 0.0, 1.5);
    for (double k : {0.5, 2.0, 7.0}) {
      const auto w = free_wave(k, +1, ff);
      for (int i = 0; i <= 30; ++i) flux_err = std::max(flux_err, std::abs(w.flux(0.05 * i) - k));
    }
  }
  t.require(flux_err < 1e-10, "free flux error " + detail::fmt("%.1e", flux_err));
  return {8, "continuity and unitarity", t.ok, t.text};
}

// 9. Uncertainty inequality on numeric eigenstates with a measured allowance.
inline CheckResult check_uncertainty(const Options& o) {
  detail::Tally t;
  const std::size_t n1 = o.quick ? 1001 : 2001, n2 = 2 * n1 - 1;
  bool holds = true;
  double eps1 = 0.0, eps2 = 0.0;
  for (double g : {-0.5, 0.0, 0.5, 1.0}) {
    const auto spec = WellSpec::make(g, 1.0);
    const auto pot = PotentialSpec::infinite_well(spec);
    for (std::size_t n_grid : {n1, n2}) {
      const auto sol = solve_bound_states(pot, 10, n_grid);
      for (const auto& psi : sol.states) {
        const auto r = expectations(psi, spec.frame);
        const double eps = std::abs(r.robertson_term - r.uncertainty_bound);
        holds = holds && r.uncertainty_product >= r.uncertainty_bound - eps;
        (n_grid == n1 ? eps1 : eps2) = std::max(n_grid == n1 ? eps1 : eps2, eps);
      }
    }
  }
  t.require(holds, "dx dp >= (hbar/2)(1 + gamma <x>) - eps_h");
  const double p = std::log2(eps1 / eps2);
  t.require(std::abs(p - 2.0) <= 0.2, "eps_h " + detail::fmt("%.2e", eps1) + " -> " + detail::fmt("%.2e", eps2) +
                                          ", order " + detail::fmt("%.3f", p));
  return {9, "uncertainty inequality", t.ok, t.text};
}

inline Report run_all(const Options& o = {}) {
  using clock = std::chrono::steady_clock;
  struct Entry {
    const char* name;
    std::function<CheckResult(const Options&)> run;
  };
  const std::vector<Entry> checks{{"spectrum exactness", check_spectrum},
                                  {"energy ordering", check_energy_ordering},
                                  {"mean position", check_mean_position},
                                  {"normalization", check_normalization},
                                  {"barrier transmission", check_barrier},
                                  {"2D densities", check_density_2d},
                                  {"operator identities", check_operator_identities},
                                  {"continuity and unitarity", check_continuity},
                                  {"uncertainty inequality", check_uncertainty}};
  Report rep;
  const auto start = clock::now();
  for (std::size_t k = 0; k < checks.size(); ++k) {
    const auto t0 = clock::now();
    CheckResult r{static_cast<int>(k + 1), checks[k].name, false, ""};
    try {
      r = checks[k].run(o);
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (r.id == 1 && r.seconds >= 30.0) {
      r.passed = false;
      r.detail += "; FAIL runtime " + detail::fmt("%.1f s", r.seconds);
    }
    rep.checks.push_back(std::move(r));
  }
  rep.seconds = std::chrono::duration<double>(clock::now() - start).count();
  const double budget = o.quick ? 30.0 : 300.0;
  CheckResult e2e{10, "end-to-end budget", rep.seconds < budget && rep.passed(),
                  detail::fmt("%.1f s", rep.seconds) + " of " + detail::fmt("%.0f s", budget) +
                      (rep.passed() ? "" : "; earlier checks failed")};
  e2e.seconds = rep.seconds;
  rep.checks.push_back(std::move(e2e));
  return rep;
}

}  // namespace gqm::verify
