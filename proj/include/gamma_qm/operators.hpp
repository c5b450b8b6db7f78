#pragma once

// Grid-level operators of the deformed formalism.
//
// Derivatives use Lagrange (Fornberg) weights on the actual sample positions:
// three-point centered stencils in the interior, three-point one-sided
// stencils for first derivatives at the edges and four-point one-sided
// stencils for second derivatives at the edges. On uniform grids every
// stencil is second order.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "gamma_qm/errors.hpp"
#include "gamma_qm/frame.hpp"

namespace gqm {

namespace detail {

/// Finite-difference weights for derivatives 0..max_order at z from nodes x (Fornberg 1988).
/// Returns weights[node][order].
template <std::size_t N>
std::array<std::array<double, 3>, N> fornberg_weights(double z, const std::array<double, N>& x, int max_order) {
  std::array<std::array<double, 3>, N> c{};
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < N; ++i) {
    const int mn = std::min(static_cast<int>(i), max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  return c;
}

template <class T, std::size_t N>
T apply_stencil(std::span<const double> x, std::span<const T> f, std::size_t first, std::size_t at, int order) {
  std::array<double, N> nodes{};
  for (std::size_t k = 0; k < N; ++k) nodes[k] = x[first + k];
  const auto w = fornberg_weights<N>(x[at], nodes, order);
  T acc{};
  for (std::size_t k = 0; k < N; ++k) acc += w[k][order] * f[first + k];
  return acc;
}

}  // namespace detail

/// First derivative of sampled values, second order on smooth grids.
template <class T>
std::vector<T> differentiate(std::span<const double> x, std::span<const T> f) {
  const std::size_t n = x.size();
  if (n < 3) throw size_error("differentiate: need at least 3 points");
  if (f.size() != n) throw size_error("differentiate: length mismatch");
  std::vector<T> d(n);
  d[0] = detail::apply_stencil<T, 3>(x, f, 0, 0, 1);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = detail::apply_stencil<T, 3>(x, f, i - 1, i, 1);
  d[n - 1] = detail::apply_stencil<T, 3>(x, f, n - 3, n - 1, 1);
  return d;
}

/// Second derivative; needs four points for the one-sided edge stencils.
template <class T>
std::vector<T> differentiate2(std::span<const double> x, std::span<const T> f) {
  const std::size_t n = x.size();
  if (n < 4) throw size_error("differentiate2: need at least 4 points");
  if (f.size() != n) throw size_error("differentiate2: length mismatch");
  std::vector<T> d(n);
  d[0] = detail::apply_stencil<T, 4>(x, f, 0, 0, 2);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = detail::apply_stencil<T, 3>(x, f, i - 1, i, 2);
  d[n - 1] = detail::apply_stencil<T, 4>(x, f, n - 4, n - 1, 2);
  return d;
}

/// D_gamma psi = (1 + gamma*x) dpsi/dx.
inline std::vector<complex> deformed_derivative(const Wavefunction1D& psi, const GammaFrame& frame) {
  require_grid_in_frame(psi.grid, frame, "deformed_derivative");
  const auto x = psi.grid.points();
  auto d = differentiate<complex>(x, psi.amplitudes);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= frame.stretch(x[i]);
  return d;
}

/// p_gamma psi = -i hbar D_gamma psi.
inline std::vector<complex> momentum_apply(const Wavefunction1D& psi, const GammaFrame& frame) {
  auto d = deformed_derivative(psi, frame);
  const complex factor(0.0, -frame.hbar());
  for (auto& v : d) v *= factor;
  return d;
}

/// Max over interior points of |[x, p_gamma] psi - i hbar (1 + gamma*x) psi|.
inline double commutator_residual(const Wavefunction1D& psi, const GammaFrame& frame) {
  const auto x = psi.grid.points();
  const std::size_t n = psi.size();
  std::vector<complex> x_psi(n);
  for (std::size_t i = 0; i < n; ++i) x_psi[i] = x[i] * psi.amplitudes[i];
  const auto p_psi = momentum_apply(psi, frame);
  const auto p_x_psi = momentum_apply(Wavefunction1D(psi.grid, std::move(x_psi), psi.measure), frame);

  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const complex commutator = x[i] * p_psi[i] - p_x_psi[i];
    const complex expected = complex(0.0, frame.hbar() * frame.stretch(x[i])) * psi.amplitudes[i];
    worst = std::max(worst, std::abs(commutator - expected));
  }
  return worst;
}

/// J_gamma at one point from a value and its exact x-derivative.
inline double flux_density(double x, complex psi, complex dpsi_dx, const GammaFrame& frame) {
  return frame.hbar() * frame.stretch(x) / frame.mass() * std::imag(std::conj(psi) * dpsi_dx);
}

/// J_gamma = hbar (1 + gamma*x) / (2 m i) (psi* psi' - psi psi*') on the grid.
inline std::vector<double> probability_flux(const Wavefunction1D& psi, const GammaFrame& frame) {
  require_grid_in_frame(psi.grid, frame, "probability_flux");
  const auto x = psi.grid.points();
  const auto d = differentiate<complex>(x, psi.amplitudes);
  std::vector<double> j(psi.size());
  for (std::size_t i = 0; i < j.size(); ++i) j[i] = flux_density(x[i], psi.amplitudes[i], d[i], frame);
  return j;
}

namespace detail {

template <class T>
T trapezoid(std::span<const double> x, std::span<const T> values, NormMeasure measure, double gamma) {
  if (values.size() != x.size()) throw size_error("quadrature: values/grid length mismatch");
  auto weighted = [&](std::size_t i) -> T {
    return measure == NormMeasure::deformed ? values[i] / stretch(x[i], gamma) : values[i];
  };
  T sum{};
  T prev = weighted(0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const T cur = weighted(i);
    sum += 0.5 * (x[i] - x[i - 1]) * (prev + cur);
    prev = cur;
  }
  return sum;
}

}  // namespace detail

/// Composite trapezoid of values * w(x), w = 1 (standard) or 1/(1 + gamma*x) (deformed).
inline double quadrature(std::span<const double> values, const Grid1D& grid, NormMeasure measure,
                         const GammaFrame& frame) {
  return detail::trapezoid<double>(grid.points(), values, measure, frame.gamma());
}

inline double norm_squared(const Wavefunction1D& psi, const GammaFrame& frame) {
  const auto rho = psi.density();
  return quadrature(rho, psi.grid, psi.measure, frame);
}

/// Rescales psi to unit norm under its own measure tag.
inline Wavefunction1D normalized(Wavefunction1D psi, const GammaFrame& frame) {
  const double nrm = std::sqrt(norm_squared(psi, frame));
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw numeric_error("normalized: zero or non-finite norm");
  for (auto& a : psi.amplitudes) a /= nrm;
  return psi;
}

/// Moments of x and p_gamma for a state normalized under dx.
///
/// p_gamma is not symmetric under dx, so <psi|p_gamma psi> carries an
/// imaginary part; mean_p_gamma is its real part and the imaginary part is
/// reported separately. var_p_gamma is ||(p_gamma - mean_p_gamma) psi||^2,
/// which makes the Cauchy-Schwarz bound
///   dx * dp >= |Im <(x - <x>) psi, (p_gamma - <p>) psi>|
/// hold exactly for the discrete inner product. robertson_term is that right
/// hand side; analytically it equals (hbar/2)(1 + gamma <x>) whenever psi
/// vanishes at the ends.
struct ExpectationReport {
  double norm = 0.0;
  double mean_x = 0.0;
  double mean_p_gamma = 0.0;
  double mean_p_gamma_imag = 0.0;
  double var_x = 0.0;
  double var_p_gamma = 0.0;
  double uncertainty_product = 0.0;
  double uncertainty_bound = 0.0;
  double robertson_term = 0.0;
};

inline ExpectationReport expectations(const Wavefunction1D& psi, const GammaFrame& frame,
                                      double norm_tolerance = 1e-6) {
  const auto x = psi.grid.points();
  const std::size_t n = psi.size();
  const auto& a = psi.amplitudes;

  ExpectationReport r;
  const auto rho = psi.density();
  r.norm = detail::trapezoid<double>(x, rho, NormMeasure::standard, frame.gamma());
  if (std::abs(r.norm - 1.0) > norm_tolerance) {
    throw contract_error("expectations: state not normalized under the standard measure (norm = " +
                         std::to_string(r.norm) + ")");
  }

  std::vector<double> tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] * rho[i];
  r.mean_x = detail::trapezoid<double>(x, tmp, NormMeasure::standard, frame.gamma());
  for (std::size_t i = 0; i < n; ++i) tmp[i] = (x[i] - r.mean_x) * (x[i] - r.mean_x) * rho[i];
  r.var_x = std::max(0.0, detail::trapezoid<double>(x, tmp, NormMeasure::standard, frame.gamma()));

  const auto p = momentum_apply(psi, frame);
  std::vector<complex> ctmp(n);
  for (std::size_t i = 0; i < n; ++i) ctmp[i] = std::conj(a[i]) * p[i];
  const complex mean_p = detail::trapezoid<complex>(x, ctmp, NormMeasure::standard, frame.gamma());
  r.mean_p_gamma = mean_p.real();
  r.mean_p_gamma_imag = mean_p.imag();

  for (std::size_t i = 0; i < n; ++i) tmp[i] = std::norm(p[i] - r.mean_p_gamma * a[i]);
  r.var_p_gamma = std::max(0.0, detail::trapezoid<double>(x, tmp, NormMeasure::standard, frame.gamma()));

  for (std::size_t i = 0; i < n; ++i) ctmp[i] = (x[i] - r.mean_x) * std::conj(a[i]) * (p[i] - r.mean_p_gamma * a[i]);
  r.robertson_term = std::abs(detail::trapezoid<complex>(x, ctmp, NormMeasure::standard, frame.gamma()).imag());

  r.uncertainty_product = std::sqrt(r.var_x) * std::sqrt(r.var_p_gamma);
  r.uncertainty_bound = 0.5 * frame.hbar() * frame.stretch(r.mean_x);
  return r;
}

/// K psi = 1/2 m_e^{-1/2} p m_e^{-1/2} p psi with p = -i hbar d/dx, evaluated
/// as two nested first-derivative stencils. Values within two points of an
/// edge inherit one-sided stencil error.
inline std::vector<complex> kinetic_apply_factored(const Wavefunction1D& psi, const GammaFrame& frame) {
  if (psi.size() < 5) throw size_error("kinetic_apply_factored: need at least 5 points");
  require_grid_in_frame(psi.grid, frame, "kinetic_apply_factored");
  const auto x = psi.grid.points();
  const std::size_t n = psi.size();
  const double inv_sqrt_m = 1.0 / std::sqrt(frame.mass());
  const complex minus_i_hbar(0.0, -frame.hbar());

  auto inner = differentiate<complex>(x, psi.amplitudes);
  for (std::size_t i = 0; i < n; ++i) inner[i] *= minus_i_hbar * frame.stretch(x[i]) * inv_sqrt_m;
  auto outer = differentiate<complex>(x, inner);
  for (std::size_t i = 0; i < n; ++i) outer[i] *= 0.5 * minus_i_hbar * frame.stretch(x[i]) * inv_sqrt_m;
  return outer;
}

/// p_gamma^2 / 2m expanded: -(hbar^2/2m) [(1+gamma x)^2 psi'' + gamma (1+gamma x) psi'],
/// using a compact three-point second-difference stencil.
inline std::vector<complex> kinetic_apply_expanded(const Wavefunction1D& psi, const GammaFrame& frame) {
  require_grid_in_frame(psi.grid, frame, "kinetic_apply_expanded");
  const auto x = psi.grid.points();
  const auto d1 = differentiate<complex>(x, psi.amplitudes);
  const auto d2 = differentiate2<complex>(x, psi.amplitudes);
  const double c = -frame.hbar() * frame.hbar() / (2.0 * frame.mass());
  std::vector<complex> k(psi.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double s = frame.stretch(x[i]);
    k[i] = c * (s * s * d2[i] + frame.gamma() * s * d1[i]);
  }
  return k;
}

}  // namespace gqm
