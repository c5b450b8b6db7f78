#pragma once

// Closed-form solutions in the deformed frame.
//
// All of them follow from one observation: in u = ln(1 + gamma*x)/gamma the
// deformed derivative is d/du, so free waves are e^{+-iku}, the infinite well
// of width L is an ordinary well of width L' = u(L), and a barrier on [0, a]
// is an ordinary barrier of width a' = u(a).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gamma_qm/deformation.hpp"
#include "gamma_qm/errors.hpp"
#include "gamma_qm/frame.hpp"
#include "gamma_qm/linalg.hpp"
#include "gamma_qm/operators.hpp"

namespace gqm {

using std::numbers::pi;

// ---------------------------------------------------------------------------
// Free particle

/// exp[sign * i (k/gamma) ln(1 + gamma*x)], energy hbar^2 k^2 / 2m for every gamma.
class FreeWave {
 public:
  FreeWave(double k, int sign, GammaFrame frame) : k_(k), sign_(sign), frame_(std::move(frame)) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw contract_error("FreeWave: k must be non-negative");
    if (sign != 1 && sign != -1) throw contract_error("FreeWave: sign must be +1 or -1");
  }

  complex operator()(double x) const {
    frame_.require_contains(x, "FreeWave");
    return std::polar(1.0, sign_ * k_ * frame_.to_u(x));
  }

  /// Exact d/dx: sign * i k / (1 + gamma*x) * phi.
  complex derivative(double x) const {
    return complex(0.0, sign_ * k_ / frame_.stretch(x)) * (*this)(x);
  }

  /// J_gamma from the exact derivative; equals sign * hbar k / m identically.
  double flux(double x) const { return flux_density(x, (*this)(x), derivative(x), frame_); }

  double energy() const noexcept { return frame_.hbar() * frame_.hbar() * k_ * k_ / (2.0 * frame_.mass()); }
  double k() const noexcept { return k_; }
  int sign() const noexcept { return sign_; }
  const GammaFrame& frame() const noexcept { return frame_; }

  Wavefunction1D sample(const Grid1D& grid) const {
    require_grid_in_frame(grid, frame_, "FreeWave::sample");
    return Wavefunction1D::sample(grid, [this](double x) { return (*this)(x); });
  }

 private:
  double k_;
  int sign_;
  GammaFrame frame_;
};

inline FreeWave free_wave(double k, int sign, const GammaFrame& frame) { return FreeWave(k, sign, frame); }

// ---------------------------------------------------------------------------
// Infinite well on [0, L]

struct WellSpec {
  double L;
  GammaFrame frame;

  WellSpec(double width, GammaFrame f) : L(width), frame(std::move(f)) {
    if (!(L > 0.0) || !std::isfinite(L)) throw contract_error("WellSpec: L must be positive");
    frame.require_contains(0.0, "WellSpec");
    frame.require_contains(L, "WellSpec");
  }

  /// Frame spanning exactly [0, L].
  static WellSpec make(double gamma, double L, double mass = 1.0, double hbar = 1.0) {
    return WellSpec(L, GammaFrame(gamma, 0.0, L, mass, hbar));
  }

  double gamma() const noexcept { return frame.gamma(); }
};

/// L' = ln(1 + gamma L)/gamma.
inline double effective_length(const WellSpec& spec) { return coord_to_u(spec.L, spec.gamma()); }

namespace detail {
inline void require_quantum_number(int n, const char* what) {
  if (n < 1) throw contract_error(std::string(what) + ": quantum number must be >= 1");
}
}  // namespace detail

/// k_n = n pi gamma / ln(1 + gamma L).
inline double well_k_n(int n, const WellSpec& spec) {
  detail::require_quantum_number(n, "well_k_n");
  return static_cast<double>(n) * pi / effective_length(spec);
}

/// E_n = hbar^2 k_n^2 / 2m.
inline double well_energy(int n, const WellSpec& spec) {
  const double k = well_k_n(n, spec);
  return spec.frame.hbar() * spec.frame.hbar() * k * k / (2.0 * spec.frame.mass());
}

/// A_n with integral_0^L |phi_n|^2 dx = 1:  A_n^2 = (gamma^2 + 4 k_n^2) / (2 L k_n^2).
inline double well_normalization(int n, const WellSpec& spec) {
  detail::require_quantum_number(n, "well_normalization");
  if (is_degenerate(spec.gamma())) return std::sqrt(2.0 / spec.L);
  const double g = spec.gamma();
  const double k = well_k_n(n, spec);
  return std::sqrt((g * g + 4.0 * k * k) / (2.0 * spec.L * k * k));
}

/// phi_n(x) = A_n sin(k_n u(x)) on [0, L], zero outside.
inline double well_value(int n, const WellSpec& spec, double x) {
  if (x <= 0.0 || x >= spec.L) return 0.0;
  return well_normalization(n, spec) * std::sin(well_k_n(n, spec) * coord_to_u(x, spec.gamma()));
}

/// phi_n sampled on a grid lying inside [0, L].
inline Wavefunction1D well_wavefunction(int n, const WellSpec& spec, const Grid1D& grid) {
  detail::require_quantum_number(n, "well_wavefunction");
  const double slack = 1e-12 * std::max(1.0, spec.L);
  if (grid.front() < -slack || grid.back() > spec.L + slack) {
    throw domain_error("well_wavefunction: grid extends outside the well [0, L]");
  }
  const double a = well_normalization(n, spec);
  const double k = well_k_n(n, spec);
  std::vector<complex> amp(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    amp[i] = (x <= 0.0 || x >= spec.L) ? 0.0 : a * std::sin(k * coord_to_u(x, spec.gamma()));
  }
  return Wavefunction1D(grid, std::move(amp), NormMeasure::standard);
}

/// <x> = (L/2) [(gamma^2 + 4k^2) / (4(gamma^2 + k^2)) - (3/2) gamma / (L (gamma^2 + k^2))].
inline double well_mean_x(int n, const WellSpec& spec) {
  detail::require_quantum_number(n, "well_mean_x");
  if (is_degenerate(spec.gamma())) return 0.5 * spec.L;
  const double g = spec.gamma();
  const double k = well_k_n(n, spec);
  const double g2 = g * g;
  const double k2 = k * k;
  return 0.5 * spec.L * ((g2 + 4.0 * k2) / (4.0 * (g2 + k2)) - 1.5 * g / (spec.L * (g2 + k2)));
}

struct EigenSolution {
  std::vector<double> energies;
  std::vector<Wavefunction1D> states;
  std::vector<int> labels;
};

/// Closed-form lowest `count` well states sampled on grid.
inline EigenSolution well_eigensolution(const WellSpec& spec, int count, const Grid1D& grid) {
  EigenSolution s;
  for (int n = 1; n <= count; ++n) {
    s.energies.push_back(well_energy(n, spec));
    s.states.push_back(well_wavefunction(n, spec, grid));
    s.labels.push_back(n);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Two-dimensional well: product states

/// Row-major density, value(i, j) = rho(x_i, y_j).
struct DensityMap {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * ny + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return values[i * ny + j]; }
};

/// rho(x, y) = |phi_nx(x)|^2 |phi_ny(y)|^2.
inline DensityMap well2d_density(int nx, int ny, const WellSpec& spec_x, const WellSpec& spec_y, const Grid1D& grid_x,
                                 const Grid1D& grid_y) {
  const auto px = well_wavefunction(nx, spec_x, grid_x).density();
  const auto py = well_wavefunction(ny, spec_y, grid_y).density();
  DensityMap m{grid_x.size(), grid_y.size(), std::vector<double>(grid_x.size() * grid_y.size())};
  for (std::size_t i = 0; i < m.nx; ++i)
    for (std::size_t j = 0; j < m.ny; ++j) m(i, j) = px[i] * py[j];
  return m;
}

/// Tensor-product trapezoid over a sub-rectangle of grid indices [i0, i1] x [j0, j1].
inline double trapezoid_2d(const DensityMap& m, const Grid1D& gx, const Grid1D& gy, std::size_t i0, std::size_t i1,
                           std::size_t j0, std::size_t j1) {
  auto weight = [](const Grid1D& g, std::size_t k, std::size_t lo, std::size_t hi) {
    double w = 0.0;
    if (k > lo) w += 0.5 * (g[k] - g[k - 1]);
    if (k < hi) w += 0.5 * (g[k + 1] - g[k]);
    return w;
  };
  double sum = 0.0;
  for (std::size_t i = i0; i <= i1; ++i) {
    const double wx = weight(gx, i, i0, i1);
    for (std::size_t j = j0; j <= j1; ++j) sum += wx * weight(gy, j, j0, j1) * m(i, j);
  }
  return sum;
}

inline double trapezoid_2d(const DensityMap& m, const Grid1D& gx, const Grid1D& gy) {
  return trapezoid_2d(m, gx, gy, 0, m.nx - 1, 0, m.ny - 1);
}

/// Grid nodes nearest to every `stride`-th nodal line of phi_n, walls included.
inline std::vector<std::size_t> nodal_cell_edges(int n, int stride, const WellSpec& spec, const Grid1D& grid) {
  detail::require_quantum_number(n, "nodal_cell_edges");
  if (stride < 1 || n % stride != 0) throw contract_error("nodal_cell_edges: stride must divide n");
  const auto pts = grid.points();
  std::vector<std::size_t> edges;
  for (int j = 0; j <= n; j += stride) {
    const double x = coord_to_x(effective_length(spec) * j / n, spec.gamma());
    const auto it = std::lower_bound(pts.begin(), pts.end(), x);
    auto k = static_cast<std::size_t>(it - pts.begin());
    if (k == pts.size() || (k > 0 && x - pts[k - 1] < pts[k] - x)) --k;
    if (!edges.empty() && k <= edges.back()) throw size_error("nodal_cell_edges: grid too coarse to separate cells");
    edges.push_back(k);
  }
  return edges;
}

/// Relative spread (max - min)/min of the mean density over the interior cells
/// of the partition given by edge indices; the outermost ring of cells is skipped.
inline double coarse_grain_spread(const DensityMap& m, const Grid1D& gx, const Grid1D& gy,
                                  std::span<const std::size_t> ex, std::span<const std::size_t> ey) {
  if (ex.size() < 4 || ey.size() < 4) throw size_error("coarse_grain_spread: need at least 3 cells per axis");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t a = 1; a + 2 < ex.size(); ++a) {
    for (std::size_t b = 1; b + 2 < ey.size(); ++b) {
      const double mass = trapezoid_2d(m, gx, gy, ex[a], ex[a + 1], ey[b], ey[b + 1]);
      const double area = (gx[ex[a + 1]] - gx[ex[a]]) * (gy[ey[b + 1]] - gy[ey[b]]);
      lo = std::min(lo, mass / area);
      hi = std::max(hi, mass / area);
    }
  }
  return (hi - lo) / lo;
}

// ---------------------------------------------------------------------------
// Rectangular barrier of height V0 on [0, a]

struct BarrierSpec {
  double V0;
  double a;
  GammaFrame frame;

  BarrierSpec(double height, double width, GammaFrame f) : V0(height), a(width), frame(std::move(f)) {
    if (!(V0 > 0.0) || !std::isfinite(V0)) throw contract_error("BarrierSpec: V0 must be positive");
    if (!(a > 0.0) || !std::isfinite(a)) throw contract_error("BarrierSpec: a must be positive");
    if (!in_intrinsic_domain(a, frame.gamma())) throw domain_error("BarrierSpec: 1 + gamma*a must be positive");
  }

  /// Frame spanning the barrier region [0, a].
  static BarrierSpec make(double gamma, double V0, double a, double mass = 1.0, double hbar = 1.0) {
    return BarrierSpec(V0, a, GammaFrame(gamma, 0.0, a, mass, hbar));
  }

  double gamma() const noexcept { return frame.gamma(); }
};

/// a' = ln(1 + gamma a)/gamma.
inline double effective_width(const BarrierSpec& spec) { return coord_to_u(spec.a, spec.gamma()); }

/// Wavenumber sqrt(2 m E)/hbar.
inline double wavenumber(double energy, const GammaFrame& frame) {
  return std::sqrt(2.0 * frame.mass() * energy) / frame.hbar();
}

/// T = |t|^2 from the closed form:
///   1/T = 1 + V0^2 sin^2(q a') / (4E(E - V0))     E > V0
///   1/T = 1 + V0^2 sinh^2(kappa a') / (4E(V0 - E)) E < V0
///   1/T = 1 + m V0 a'^2 / (2 hbar^2)              E = V0
inline double barrier_transmission(double energy, const BarrierSpec& spec) {
  if (!(energy > 0.0) || !std::isfinite(energy)) throw contract_error("barrier_transmission: E must be positive");
  const double v0 = spec.V0;
  const double ap = effective_width(spec);
  const double m = spec.frame.mass();
  const double hbar = spec.frame.hbar();
  double inv_t;
  if (energy > v0) {
    const double q = std::sqrt(2.0 * m * (energy - v0)) / hbar;
    const double s = std::sin(q * ap);
    inv_t = 1.0 + v0 * v0 * s * s / (4.0 * energy * (energy - v0));
  } else if (energy < v0) {
    const double kappa = std::sqrt(2.0 * m * (v0 - energy)) / hbar;
    const double s = std::sinh(kappa * ap);
    inv_t = 1.0 + v0 * v0 * s * s / (4.0 * energy * (v0 - energy));
  } else {
    inv_t = 1.0 + m * v0 * ap * ap / (2.0 * hbar * hbar);
  }
  return 1.0 / inv_t;
}

/// Energy of the n-th over-barrier resonance, where q a' = n pi.
inline double barrier_resonance_energy(int n, const BarrierSpec& spec) {
  detail::require_quantum_number(n, "barrier_resonance_energy");
  const double q = static_cast<double>(n) * pi / effective_width(spec);
  return spec.V0 + spec.frame.hbar() * spec.frame.hbar() * q * q / (2.0 * spec.frame.mass());
}

/// Amplitudes of
///   e^{iku} + r e^{-iku}       u < 0
///   A e^{iqu} + B e^{-iqu}     0 < u < a'
///   t e^{iku}                  u > a'
/// with u = ln(1 + gamma x)/gamma. Continuity of psi and dpsi/dx at x = 0, a
/// is equivalent to continuity of psi and dpsi/du because dx/du is continuous.
struct BarrierAmplitudes {
  complex r, A, B, t;
};

inline BarrierAmplitudes barrier_coefficients(double energy, const BarrierSpec& spec) {
  if (!(energy > 0.0) || !std::isfinite(energy)) throw contract_error("barrier_coefficients: E must be positive");
  if (energy == spec.V0) throw numeric_error("barrier_coefficients: matching system is singular at E = V0");
  const double m = spec.frame.mass();
  const double hbar = spec.frame.hbar();
  const complex ik(0.0, wavenumber(energy, spec.frame));
  const complex q = std::sqrt(complex(2.0 * m * (energy - spec.V0), 0.0)) / hbar;
  const complex iq = complex(0.0, 1.0) * q;
  const double ap = effective_width(spec);
  const complex eq = std::exp(iq * ap);
  const complex eqm = std::exp(-iq * ap);
  const complex ek = std::exp(ik * ap);

  using Row = std::array<complex, 4>;
  // unknowns: r, A, B, t
  std::array<Row, 4> mat{Row{1.0, -1.0, -1.0, 0.0},
                         Row{-ik, -iq, iq, 0.0},
                         Row{0.0, eq, eqm, -ek},
                         Row{0.0, iq * eq, -iq * eqm, -ik * ek}};
  std::array<complex, 4> rhs{-1.0, -ik, 0.0, 0.0};
  const auto s = solve_dense<4>(mat, rhs);
  return {s[0], s[1], s[2], s[3]};
}

struct TransmissionCurve {
  std::vector<double> ratios;  ///< E / V0
  std::vector<double> T;
};

inline TransmissionCurve transmission_curve(const BarrierSpec& spec, std::span<const double> ratios) {
  TransmissionCurve c;
  c.ratios.assign(ratios.begin(), ratios.end());
  c.T.reserve(ratios.size());
  for (double r : ratios) c.T.push_back(barrier_transmission(r * spec.V0, spec));
  return c;
}

}  // namespace gqm
