#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gamma_qm/deformation.hpp"
#include "gamma_qm/errors.hpp"

namespace gqm {

using complex = std::complex<double>;

/// Deformation context: gamma, mass, hbar and a closed spatial interval on
/// which 1 + gamma*x stays strictly positive.
class GammaFrame {
 public:
  GammaFrame(double gamma, double x_lo, double x_hi, double mass = 1.0, double hbar = 1.0)
      : gamma_(gamma), mass_(mass), hbar_(hbar), x_lo_(x_lo), x_hi_(x_hi) {
    if (!std::isfinite(gamma)) throw contract_error("GammaFrame: gamma must be finite");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw contract_error("GammaFrame: mass must be positive");
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw contract_error("GammaFrame: hbar must be positive");
    if (!(x_lo < x_hi) || !std::isfinite(x_lo) || !std::isfinite(x_hi)) {
      throw contract_error("GammaFrame: domain must satisfy x_lo < x_hi");
    }
    // 1 + gamma*x is linear, so checking the endpoints covers the interval.
    if (!in_intrinsic_domain(x_lo, gamma) || !in_intrinsic_domain(x_hi, gamma)) {
      throw domain_error("GammaFrame: domain [" + std::to_string(x_lo) + ", " + std::to_string(x_hi) +
                         "] reaches the singular point x = -1/gamma");
    }
  }

  double gamma() const noexcept { return gamma_; }
  double mass() const noexcept { return mass_; }
  double hbar() const noexcept { return hbar_; }
  double x_lo() const noexcept { return x_lo_; }
  double x_hi() const noexcept { return x_hi_; }

  double stretch(double x) const noexcept { return gqm::stretch(x, gamma_); }
  double to_u(double x) const { return coord_to_u(x, gamma_); }
  double to_x(double u) const { return coord_to_x(u, gamma_); }

  bool contains(double x) const noexcept {
    // Grids built from coord_to_x can land a rounding error outside the interval.
    const double slack = 1e-12 * std::max({1.0, std::abs(x_lo_), std::abs(x_hi_)});
    return x >= x_lo_ - slack && x <= x_hi_ + slack;
  }

  void require_contains(double x, const char* what) const {
    if (!contains(x)) {
      throw domain_error(std::string(what) + ": x = " + std::to_string(x) + " outside frame domain [" +
                         std::to_string(x_lo_) + ", " + std::to_string(x_hi_) + "]");
    }
  }

 private:
  double gamma_;
  double mass_;
  double hbar_;
  double x_lo_;
  double x_hi_;
};

inline double effective_mass(double x, const GammaFrame& frame) {
  frame.require_contains(x, "effective_mass");
  return effective_mass(x, frame.gamma(), frame.mass());
}

inline double translate_point(double x, double a, const GammaFrame& frame) {
  frame.require_contains(x, "translate_point");
  const double y = translate_point(x, a, frame.gamma());
  frame.require_contains(y, "translate_point (result)");
  return y;
}

/// Strictly ascending sample positions, at least three of them.
class Grid1D {
 public:
  explicit Grid1D(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 3) throw size_error("Grid1D: need at least 3 points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i])) throw contract_error("Grid1D: non-finite point");
      if (i > 0 && !(points_[i] > points_[i - 1])) throw contract_error("Grid1D: points must be strictly ascending");
    }
  }

  static Grid1D uniform(double lo, double hi, std::size_t n) {
    if (n < 3) throw size_error("Grid1D::uniform: need at least 3 points");
    std::vector<double> p(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) p[i] = lo + h * static_cast<double>(i);
    p.back() = hi;
    return Grid1D(std::move(p));
  }

  /// Points in [x_lo, x_hi] that are equally spaced in u = ln(1+gamma*x)/gamma.
  static Grid1D uniform_in_u(double gamma, double x_lo, double x_hi, std::size_t n) {
    if (n < 3) throw size_error("Grid1D::uniform_in_u: need at least 3 points");
    const double u_lo = coord_to_u(x_lo, gamma);
    const double u_hi = coord_to_u(x_hi, gamma);
    std::vector<double> p(n);
    const double h = (u_hi - u_lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) p[i] = coord_to_x(u_lo + h * static_cast<double>(i), gamma);
    p.front() = x_lo;
    p.back() = x_hi;
    return Grid1D(std::move(p));
  }

  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const noexcept { return points_[i]; }
  double front() const noexcept { return points_.front(); }
  double back() const noexcept { return points_.back(); }
  std::span<const double> points() const noexcept { return points_; }

  /// True when all spacings agree with the mean spacing to within rtol.
  bool is_uniform(double rtol = 1e-9) const noexcept { return spacings_uniform(points_, rtol); }

  static bool spacings_uniform(std::span<const double> p, double rtol) noexcept {
    const double mean = (p.back() - p.front()) / static_cast<double>(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) {
      if (std::abs((p[i] - p[i - 1]) - mean) > rtol * std::abs(mean)) return false;
    }
    return true;
  }

 private:
  std::vector<double> points_;
};

inline void require_grid_in_frame(const Grid1D& grid, const GammaFrame& frame, const char* what) {
  frame.require_contains(grid.front(), what);
  frame.require_contains(grid.back(), what);
}

/// Integration measure a wavefunction is normalized against.
/// standard: dx.  deformed: dx / (1 + gamma*x), the norm conserved in time.
enum class NormMeasure { standard, deformed };

inline const char* to_string(NormMeasure m) noexcept {
  return m == NormMeasure::standard ? "standard" : "deformed";
}

struct Wavefunction1D {
  Grid1D grid;
  std::vector<complex> amplitudes;
  NormMeasure measure = NormMeasure::standard;

  Wavefunction1D(Grid1D g, std::vector<complex> a, NormMeasure m = NormMeasure::standard)
      : grid(std::move(g)), amplitudes(std::move(a)), measure(m) {
    if (amplitudes.size() != grid.size()) throw size_error("Wavefunction1D: amplitude/grid length mismatch");
  }

  static Wavefunction1D sample(Grid1D g, const std::function<complex(double)>& f,
                               NormMeasure m = NormMeasure::standard) {
    std::vector<complex> a(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) a[i] = f(g[i]);
    return Wavefunction1D(std::move(g), std::move(a), m);
  }

  std::size_t size() const noexcept { return amplitudes.size(); }

  std::vector<double> density() const {
    std::vector<double> rho(amplitudes.size());
    std::transform(amplitudes.begin(), amplitudes.end(), rho.begin(), [](complex z) { return std::norm(z); });
    return rho;
  }
};

}  // namespace gqm
