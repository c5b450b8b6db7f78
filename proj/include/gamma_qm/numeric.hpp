#pragma once

// Numerical engine, independent of the closed forms in analytic.hpp.
//
// The primary discretization works in u = ln(1 + gamma x)/gamma, where the
// deformed Hamiltonian -(hbar^2/2m) D_gamma^2 + V becomes the ordinary
// -(hbar^2/2m) d^2/du^2 + V(x(u)). A second discretization works directly in
// x on the Sturm-Liouville form
//     -(hbar^2/2m) d/dx[(1+gamma x) dphi/dx] + V/(1+gamma x) phi = E phi/(1+gamma x)
// and exists only to cross-check the first.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "gamma_qm/analytic.hpp"
#include "gamma_qm/errors.hpp"
#include "gamma_qm/frame.hpp"
#include "gamma_qm/linalg.hpp"
#include "gamma_qm/operators.hpp"
#include "gamma_qm/tridiagonal.hpp"

namespace gqm {

// ---------------------------------------------------------------------------
// Potentials

struct NullPotential {};
struct InfiniteWell {
  double L;
};
struct RectangularBarrier {
  double V0;
  double a;
};
/// Piecewise-linear interpolation of samples; undefined outside [x.front(), x.back()].
struct TabulatedPotential {
  std::vector<double> x;
  std::vector<double> values;
};

class PotentialSpec {
 public:
  using Kind = std::variant<NullPotential, InfiniteWell, RectangularBarrier, TabulatedPotential>;

  PotentialSpec(Kind kind, GammaFrame frame) : kind_(std::move(kind)), frame_(std::move(frame)) { validate(); }

  static PotentialSpec null(const GammaFrame& frame) { return {NullPotential{}, frame}; }
  static PotentialSpec infinite_well(double L, const GammaFrame& frame) { return {InfiniteWell{L}, frame}; }
  static PotentialSpec infinite_well(const WellSpec& spec) { return {InfiniteWell{spec.L}, spec.frame}; }
  static PotentialSpec barrier(double V0, double a, const GammaFrame& frame) { return {RectangularBarrier{V0, a}, frame}; }
  static PotentialSpec tabulated(std::vector<double> x, std::vector<double> v, const GammaFrame& frame) {
    return {TabulatedPotential{std::move(x), std::move(v)}, frame};
  }

  const Kind& kind() const noexcept { return kind_; }
  const GammaFrame& frame() const noexcept { return frame_; }
  bool is_infinite_well() const noexcept { return std::holds_alternative<InfiniteWell>(kind_); }

  /// Interval carrying Dirichlet walls: [0, L] for the well, the frame domain otherwise.
  std::pair<double, double> box() const {
    if (const auto* w = std::get_if<InfiniteWell>(&kind_)) return {0.0, w->L};
    return {frame_.x_lo(), frame_.x_hi()};
  }

  double value(double x) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, NullPotential>) {
            return 0.0;
          } else if constexpr (std::is_same_v<K, InfiniteWell>) {
            return (x >= 0.0 && x <= k.L) ? 0.0 : std::numeric_limits<double>::infinity();
          } else if constexpr (std::is_same_v<K, RectangularBarrier>) {
            return (x >= 0.0 && x <= k.a) ? k.V0 : 0.0;
          } else {
            if (x < k.x.front() || x > k.x.back()) {
              throw contract_error("PotentialSpec: tabulated potential evaluated outside its table");
            }
            auto it = std::upper_bound(k.x.begin(), k.x.end(), x);
            if (it == k.x.end()) return k.values.back();
            const auto j = static_cast<std::size_t>(it - k.x.begin());
            const double t = (x - k.x[j - 1]) / (k.x[j] - k.x[j - 1]);
            return (1.0 - t) * k.values[j - 1] + t * k.values[j];
          }
        },
        kind_);
  }

 private:
  void validate() const {
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, InfiniteWell>) {
            if (!(k.L > 0.0)) throw contract_error("PotentialSpec: well width must be positive");
            frame_.require_contains(0.0, "PotentialSpec(infinite_well)");
            frame_.require_contains(k.L, "PotentialSpec(infinite_well)");
          } else if constexpr (std::is_same_v<K, RectangularBarrier>) {
            if (!(k.V0 > 0.0) || !(k.a > 0.0)) throw contract_error("PotentialSpec: barrier V0 and a must be positive");
          } else if constexpr (std::is_same_v<K, TabulatedPotential>) {
            if (k.x.size() < 2 || k.x.size() != k.values.size()) {
              throw size_error("PotentialSpec: tabulated potential needs >= 2 matching samples");
            }
            for (std::size_t i = 0; i < k.x.size(); ++i) {
              if (!std::isfinite(k.x[i]) || !std::isfinite(k.values[i])) {
                throw contract_error("PotentialSpec: tabulated values must be finite");
              }
              if (i > 0 && !(k.x[i] > k.x[i - 1])) throw contract_error("PotentialSpec: table abscissae must ascend");
            }
          }
        },
        kind_);
  }

  Kind kind_;
  GammaFrame frame_;
};

// ---------------------------------------------------------------------------
// Hamiltonians

/// Three-point -(hbar^2/2m) d^2/du^2 + V(x(u)) on the interior nodes of a
/// uniform u-grid; the two end nodes carry Dirichlet walls.
inline TridiagonalOperator build_hamiltonian_u(const PotentialSpec& potential, const Grid1D& grid_u) {
  if (!grid_u.is_uniform(1e-9)) throw contract_error("build_hamiltonian_u: u-grid must be uniform");
  const auto& f = potential.frame();
  const std::size_t n = grid_u.size();
  const double h = (grid_u.back() - grid_u.front()) / static_cast<double>(n - 1);
  const double c = f.hbar() * f.hbar() / (2.0 * f.mass() * h * h);
  std::vector<double> d(n - 2), e(n - 3 > 0 ? n - 3 : 0, -c);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double v = potential.value(f.to_x(grid_u[i]));
    if (!std::isfinite(v)) throw contract_error("build_hamiltonian_u: infinite potential at an interior node");
    d[i - 1] = 2.0 * c + v;
  }
  return TridiagonalOperator(std::move(d), std::move(e));
}

/// Symmetrized x-space operator S = W^{-1/2} A W^{-1/2}; eigenvector y of S
/// maps back to phi = inv_sqrt_weight * y.
struct XSpaceHamiltonian {
  TridiagonalOperator op;
  std::vector<double> inv_sqrt_weight;  ///< sqrt(1 + gamma x) at interior nodes
};

inline XSpaceHamiltonian build_hamiltonian_x(const PotentialSpec& potential, const Grid1D& grid_x) {
  if (!grid_x.is_uniform(1e-9)) throw contract_error("build_hamiltonian_x: x-grid must be uniform");
  const auto& f = potential.frame();
  require_grid_in_frame(grid_x, f, "build_hamiltonian_x");
  const std::size_t n = grid_x.size();
  const double h = (grid_x.back() - grid_x.front()) / static_cast<double>(n - 1);
  const double c = f.hbar() * f.hbar() / (2.0 * f.mass() * h * h);
  const std::size_t m = n - 2;
  std::vector<double> d(m), e(m > 0 ? m - 1 : 0), isw(m);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double x = grid_x[i];
    const double w = 1.0 / f.stretch(x);
    const double p_minus = f.stretch(0.5 * (grid_x[i - 1] + x));
    const double p_plus = f.stretch(0.5 * (x + grid_x[i + 1]));
    const double v = potential.value(x);
    if (!std::isfinite(v)) throw contract_error("build_hamiltonian_x: infinite potential at an interior node");
    d[i - 1] = (c * (p_minus + p_plus) + w * v) / w;
    isw[i - 1] = 1.0 / std::sqrt(w);
    if (i + 2 < n) {
      const double w_next = 1.0 / f.stretch(grid_x[i + 1]);
      e[i - 1] = -c * p_plus / std::sqrt(w * w_next);
    }
  }
  return {TridiagonalOperator(std::move(d), std::move(e)), std::move(isw)};
}

// ---------------------------------------------------------------------------
// Bound states

enum class Discretization { u_space, x_space };

struct BoundStateOptions {
  Discretization backend = Discretization::u_space;
  /// Combine the n_grid solve with one on a grid of n_grid/2 points to cancel the h^2 error term.
  bool richardson = false;
  EigsOptions eigs{};
};

struct BoundStateSolution : EigenSolution {
  /// Second-order energies on the n_grid mesh (identical to `energies` without Richardson).
  std::vector<double> raw_energies;
  std::size_t n_grid = 0;
};

namespace detail {

struct RawBoundStates {
  std::vector<double> energies;
  std::vector<Wavefunction1D> states;
  double spacing = 0.0;
};

inline RawBoundStates solve_raw(const PotentialSpec& potential, std::size_t n_states, std::size_t n_grid,
                                Discretization backend, const EigsOptions& eigs) {
  const auto& f = potential.frame();
  const auto [lo, hi] = potential.box();
  RawBoundStates out;
  std::vector<double> xs(n_grid);
  std::vector<std::vector<double>> vecs;

  if (backend == Discretization::u_space) {
    const auto grid_u = Grid1D::uniform(f.to_u(lo), f.to_u(hi), n_grid);
    const auto op = build_hamiltonian_u(potential, grid_u);
    auto pairs = eigs_lowest(op, n_states, eigs);
    out.energies = std::move(pairs.values);
    vecs = std::move(pairs.vectors);
    for (std::size_t i = 0; i < n_grid; ++i) xs[i] = f.to_x(grid_u[i]);
    out.spacing = grid_u[1] - grid_u[0];
  } else {
    const auto grid_x = Grid1D::uniform(lo, hi, n_grid);
    const auto xh = build_hamiltonian_x(potential, grid_x);
    auto pairs = eigs_lowest(xh.op, n_states, eigs);
    out.energies = std::move(pairs.values);
    vecs = std::move(pairs.vectors);
    for (auto& v : vecs)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] *= xh.inv_sqrt_weight[i];
    for (std::size_t i = 0; i < n_grid; ++i) xs[i] = grid_x[i];
    out.spacing = grid_x[1] - grid_x[0];
  }
  xs.front() = lo;
  xs.back() = hi;
  const Grid1D grid(std::move(xs));

  for (const auto& v : vecs) {
    std::vector<complex> amp(n_grid, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) amp[i + 1] = v[i];
    out.states.push_back(normalized(Wavefunction1D(grid, std::move(amp), NormMeasure::standard), f));
  }
  return out;
}

}  // namespace detail

/// Lowest n_states bound states with Dirichlet walls at the ends of potential.box().
/// States are sampled on x-nodes (uniform in u for the u-space backend) and
/// normalized under the standard measure.
inline BoundStateSolution solve_bound_states(const PotentialSpec& potential, std::size_t n_states, std::size_t n_grid,
                                             const BoundStateOptions& opts = {}) {
  if (n_states == 0) throw contract_error("solve_bound_states: need at least one state");
  if (n_grid < 3 || n_grid - 1 < 10 * n_states) {
    throw size_error("solve_bound_states: " + std::to_string(n_grid) + " points cannot resolve " +
                     std::to_string(n_states) + " states (need >= 10 points per half-wavelength)");
  }
  auto fine = detail::solve_raw(potential, n_states, n_grid, opts.backend, opts.eigs);

  BoundStateSolution s;
  s.n_grid = n_grid;
  s.raw_energies = fine.energies;
  s.energies = fine.energies;
  if (opts.richardson) {
    const std::size_t n_coarse = n_grid / 2;
    if (n_coarse < 3 || n_coarse - 1 < 10 * n_states) {
      throw size_error("solve_bound_states: grid too small for Richardson extrapolation");
    }
    const auto coarse = detail::solve_raw(potential, n_states, n_coarse, opts.backend, opts.eigs);
    const double hf2 = fine.spacing * fine.spacing;
    const double hc2 = coarse.spacing * coarse.spacing;
    for (std::size_t k = 0; k < n_states; ++k) {
      s.energies[k] = (hc2 * fine.energies[k] - hf2 * coarse.energies[k]) / (hc2 - hf2);
    }
  }
  s.states = std::move(fine.states);
  for (std::size_t k = 0; k < n_states; ++k) s.labels.push_back(static_cast<int>(k + 1));
  return s;
}

// ---------------------------------------------------------------------------
// Transfer matrices

using Mat2 = std::array<std::array<complex, 2>, 2>;

inline Mat2 multiply(const Mat2& a, const Mat2& b) noexcept {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

inline complex determinant(const Mat2& m) noexcept { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

/// Constant-potential slab of u-width d, mapping (psi, dpsi/du) from its left to its right face:
///   [[cos qd, sin(qd)/q], [-q sin qd, cos qd]],  q^2 = 2m(E - V)/hbar^2.
/// Entire in q^2, so E = V and evanescent slabs need no special casing; det = 1.
inline Mat2 slab_matrix(double energy, double potential, double width_u, double mass, double hbar) {
  const double q2 = 2.0 * mass * (energy - potential) / (hbar * hbar);
  const complex q = std::sqrt(complex(q2, 0.0));
  const complex qd = q * width_u;
  complex sinc_d;  // sin(qd)/q
  if (std::abs(qd) < 1e-4) {
    const complex z2 = qd * qd;
    sinc_d = width_u * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
  } else {
    sinc_d = std::sin(qd) / q;
  }
  const complex c = std::cos(qd);
  return Mat2{{{c, sinc_d}, {-q2 * sinc_d, c}}};
}

struct Slab {
  double width_u;
  double potential;
};

struct ScatteringResult {
  complex r;
  complex t;
  double T;
  double R;
};

/// Scattering through slabs placed from u = 0 onward, with V = 0 leads on both sides.
inline ScatteringResult transfer_matrix_scattering(double energy, std::span<const Slab> slabs, double mass,
                                                   double hbar) {
  if (!(energy > 0.0) || !std::isfinite(energy)) throw contract_error("transfer_matrix: E must be positive");
  Mat2 m{{{1.0, 0.0}, {0.0, 1.0}}};
  double total = 0.0;
  for (const auto& s : slabs) {
    m = multiply(slab_matrix(energy, s.potential, s.width_u, mass, hbar), m);
    total += s.width_u;
  }
  const double k = std::sqrt(2.0 * mass * energy) / hbar;
  const complex ik(0.0, k);
  const complex den = ik * (m[0][0] + m[1][1]) + k * k * m[0][1] - m[1][0];
  const complex tau = 2.0 * ik / den;  // t e^{ik total}
  const complex r = (m[1][0] + ik * m[1][1] - ik * m[0][0] + k * k * m[0][1]) / den;
  return {r, tau * std::exp(-ik * total), std::norm(tau), std::norm(r)};
}

inline ScatteringResult transfer_matrix_scattering(double energy, const BarrierSpec& spec) {
  const std::array<Slab, 1> slabs{Slab{effective_width(spec), spec.V0}};
  return transfer_matrix_scattering(energy, slabs, spec.frame.mass(), spec.frame.hbar());
}

inline double transfer_matrix_transmission(double energy, const BarrierSpec& spec) {
  return transfer_matrix_scattering(energy, spec).T;
}

// ---------------------------------------------------------------------------
// Time evolution

struct EvolveOptions {
  /// Keep every k-th step as a snapshot (0 picks max(1, steps/10)). The initial
  /// state is always the first snapshot and the final state always the last.
  std::size_t snapshot_every = 0;
  /// Record the discrete continuity residual at every step.
  bool track_continuity = true;
};

struct PropagationResult {
  std::vector<Wavefunction1D> snapshots;
  std::vector<double> times;
  std::vector<double> deformed_norms;  ///< integral |psi|^2 dx/(1+gamma x) per snapshot
  std::vector<double> standard_norms;  ///< integral |psi|^2 dx per snapshot
  /// N_std(0) + gamma * integral_0^t integral J_gamma dx dt', the standard norm
  /// implied by the modified continuity equation, per snapshot.
  std::vector<double> flux_predicted_standard_norms;
  /// max over interior nodes of |d rho/dt + (1+gamma x) dJ/dx| for each step.
  std::vector<double> continuity_residuals;
  /// Largest |N_def(t)/N_def(0) - 1| over all steps.
  double max_deformed_drift = 0.0;
  std::vector<std::string> warnings;
};

/// Normalized Gaussian exp(-(x-x0)^2/(4 sigma^2) + i k0 x) under the given measure.
inline Wavefunction1D gaussian_packet(const Grid1D& grid, const GammaFrame& frame, double x0, double sigma, double k0,
                                      NormMeasure measure = NormMeasure::deformed) {
  auto psi = Wavefunction1D::sample(
      grid,
      [&](double x) {
        const double d = x - x0;
        return std::exp(complex(-d * d / (4.0 * sigma * sigma), k0 * x));
      },
      measure);
  return normalized(std::move(psi), frame);
}

namespace detail {

/// trapezoid over a uniform u-grid of |psi|^2, i.e. the deformed-measure norm.
inline double u_norm(std::span<const complex> psi, double hu) {
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double w = (i == 0 || i + 1 == psi.size()) ? 0.5 : 1.0;
    s += w * std::norm(psi[i]);
  }
  return s * hu;
}

}  // namespace detail

/// Crank-Nicolson propagation of psi0 in u-coordinates with Dirichlet walls at the
/// grid ends. psi0's grid must be uniform in u (see Grid1D::uniform_in_u).
inline PropagationResult time_evolve(const Wavefunction1D& psi0, const PotentialSpec& potential, double dt,
                                     std::size_t steps, const EvolveOptions& opts = {}) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw contract_error("time_evolve: dt must be positive");
  const auto& f = potential.frame();
  const auto& grid = psi0.grid;
  require_grid_in_frame(grid, f, "time_evolve");
  const auto [box_lo, box_hi] = potential.box();
  const double slack = 1e-12 * std::max({1.0, std::abs(box_lo), std::abs(box_hi)});
  if (grid.front() < box_lo - slack || grid.back() > box_hi + slack) {
    throw contract_error("time_evolve: grid extends outside the potential's box");
  }
  const std::size_t n = grid.size();
  std::vector<double> us(n);
  for (std::size_t i = 0; i < n; ++i) us[i] = f.to_u(grid[i]);
  if (!Grid1D::spacings_uniform(us, 1e-8)) throw contract_error("time_evolve: grid must be uniform in u");
  const Grid1D grid_u(us);
  const double hu = (us.back() - us.front()) / static_cast<double>(n - 1);

  PropagationResult res;
  std::vector<complex> psi(psi0.amplitudes);
  const double initial_norm = detail::u_norm(psi, hu);
  if (!(initial_norm > 0.0) || !std::isfinite(initial_norm)) throw numeric_error("time_evolve: initial state has no norm");
  for (std::size_t i : {std::size_t{0}, n - 1}) {
    if (std::norm(psi[i]) > 1e-8 * initial_norm) {
      res.warnings.push_back("time_evolve: initial state has significant amplitude at the wall x = " +
                             std::to_string(grid[i]) + "; it is clamped to zero");
    }
  }
  psi.front() = 0.0;
  psi.back() = 0.0;
  const double n_def0 = detail::u_norm(psi, hu);

  const auto h = build_hamiltonian_u(potential, grid_u);
  const std::size_t m = n - 2;
  const complex tau(0.0, dt / (2.0 * f.hbar()));
  std::vector<complex> a_sub(m > 0 ? m - 1 : 0), a_diag(m), a_sup(m > 0 ? m - 1 : 0);
  for (std::size_t i = 0; i < m; ++i) a_diag[i] = 1.0 + tau * h.diagonal[i];
  for (std::size_t i = 0; i + 1 < m; ++i) a_sub[i] = a_sup[i] = tau * h.off_diagonal[i];
  const TridiagonalLU<complex> lu(std::move(a_sub), std::move(a_diag), std::move(a_sup));

  const std::size_t every = opts.snapshot_every > 0 ? opts.snapshot_every : std::max<std::size_t>(1, steps / 10);
  const auto x = grid.points();
  double predicted = quadrature(Wavefunction1D(grid, psi).density(), grid, NormMeasure::standard, f);

  auto record = [&](double t) {
    Wavefunction1D snap(grid, psi, psi0.measure);
    res.deformed_norms.push_back(detail::u_norm(psi, hu));
    res.standard_norms.push_back(quadrature(snap.density(), grid, NormMeasure::standard, f));
    res.flux_predicted_standard_norms.push_back(predicted);
    res.snapshots.push_back(std::move(snap));
    res.times.push_back(t);
  };
  record(0.0);

  std::vector<complex> next(m), prev(n), mid(n);
  for (std::size_t step = 1; step <= steps; ++step) {
    prev = psi;
    for (std::size_t i = 0; i < m; ++i) {
      complex hv = h.diagonal[i] * psi[i + 1];
      if (i > 0) hv += h.off_diagonal[i - 1] * psi[i];
      if (i + 1 < m) hv += h.off_diagonal[i] * psi[i + 2];
      next[i] = psi[i + 1] - tau * hv;
    }
    lu.solve_in_place(next);
    for (std::size_t i = 0; i < m; ++i) {
      if (!std::isfinite(next[i].real()) || !std::isfinite(next[i].imag())) {
        throw numeric_error("time_evolve: non-finite amplitude at step " + std::to_string(step));
      }
      psi[i + 1] = next[i];
    }

    // Continuity bookkeeping at the Crank-Nicolson midpoint.
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (prev[i] + psi[i]);
    const auto flux = probability_flux(Wavefunction1D(grid, mid), f);
    predicted += f.gamma() * dt * detail::trapezoid<double>(x, flux, NormMeasure::standard, f.gamma());
    if (opts.track_continuity) {
      const auto dflux = differentiate<double>(x, flux);
      double worst = 0.0;
      for (std::size_t i = 2; i + 2 < n; ++i) {
        const double drho = (std::norm(psi[i]) - std::norm(prev[i])) / dt;
        worst = std::max(worst, std::abs(drho + f.stretch(x[i]) * dflux[i]));
      }
      res.continuity_residuals.push_back(worst);
    }

    res.max_deformed_drift = std::max(res.max_deformed_drift, std::abs(detail::u_norm(psi, hu) / n_def0 - 1.0));
    if (step % every == 0 || step == steps) record(dt * static_cast<double>(step));
  }
  return res;
}

}  // namespace gqm
