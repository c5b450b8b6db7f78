#pragma once

// Lowest eigenpairs of a real symmetric tridiagonal matrix.
//
// Eigenvalues come from bisection on Sturm counts, so every value is returned
// with a certified bracket. Eigenvectors come from inverse iteration with a
// pivoted LU of (T - lambda I), re-orthogonalized against earlier vectors of
// the same cluster.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gamma_qm/errors.hpp"
#include "gamma_qm/linalg.hpp"

namespace gqm {

struct TridiagonalOperator {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;

  TridiagonalOperator() = default;
  TridiagonalOperator(std::vector<double> d, std::vector<double> e) : diagonal(std::move(d)), off_diagonal(std::move(e)) {
    validate();
  }

  void validate() const {
    if (diagonal.empty()) throw size_error("TridiagonalOperator: empty");
    if (off_diagonal.size() + 1 != diagonal.size()) throw size_error("TridiagonalOperator: off-diagonal length must be n-1");
    for (double v : diagonal)
      if (!std::isfinite(v)) throw numeric_error("TridiagonalOperator: non-finite diagonal entry");
    for (double v : off_diagonal)
      if (!std::isfinite(v)) throw numeric_error("TridiagonalOperator: non-finite off-diagonal entry");
  }

  std::size_t size() const noexcept { return diagonal.size(); }

  std::vector<double> apply(std::span<const double> v) const {
    const std::size_t n = size();
    if (v.size() != n) throw size_error("TridiagonalOperator::apply: length mismatch");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = diagonal[i] * v[i];
      if (i > 0) s += off_diagonal[i - 1] * v[i - 1];
      if (i + 1 < n) s += off_diagonal[i] * v[i + 1];
      out[i] = s;
    }
    return out;
  }

  /// Gershgorin enclosure of the spectrum.
  std::pair<double, double> gershgorin() const noexcept {
    const std::size_t n = size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      if (i > 0) r += std::abs(off_diagonal[i - 1]);
      if (i + 1 < n) r += std::abs(off_diagonal[i]);
      lo = std::min(lo, diagonal[i] - r);
      hi = std::max(hi, diagonal[i] + r);
    }
    return {lo, hi};
  }

  double norm_inf() const noexcept {
    const auto [lo, hi] = gershgorin();
    return std::max(std::abs(lo), std::abs(hi));
  }

  /// Leading k x k principal submatrix.
  TridiagonalOperator leading(std::size_t k) const {
    if (k == 0 || k > size()) throw size_error("TridiagonalOperator::leading: bad size");
    return TridiagonalOperator(std::vector<double>(diagonal.begin(), diagonal.begin() + static_cast<std::ptrdiff_t>(k)),
                               std::vector<double>(off_diagonal.begin(), off_diagonal.begin() + static_cast<std::ptrdiff_t>(k - 1)));
  }
};

namespace detail {

inline double pivot_minimum(const TridiagonalOperator& t) {
  double emax = 1.0;
  for (double e : t.off_diagonal) emax = std::max(emax, e * e);
  return std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon() * emax;
}

inline std::size_t sturm_count(const TridiagonalOperator& t, double shift, double pivmin) {
  std::size_t count = 0;
  double q = t.diagonal[0] - shift;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double e = t.off_diagonal[i - 1];
    q = t.diagonal[i] - shift - e * e / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace detail

/// Number of eigenvalues strictly below `shift`.
inline std::size_t sturm_count(const TridiagonalOperator& t, double shift) {
  return detail::sturm_count(t, shift, detail::pivot_minimum(t));
}

struct EigsOptions {
  /// Inverse-iteration sweeps per start vector.
  int iterations = 3;
  /// Fresh random start vectors tried before giving up.
  int restarts = 4;
  /// Eigenvalues closer than this multiple of ||T|| are orthogonalized against each other.
  double cluster_tolerance = 1e-3;
  std::uint64_t seed = 0x5eed'1234'abcdULL;
};

struct EigenPairs {
  std::vector<double> values;
  /// Unit 2-norm eigenvectors, values[i] <-> vectors[i].
  std::vector<std::vector<double>> vectors;
  /// Width of the final bisection bracket around each value.
  std::vector<double> bracket_widths;
  double scale = 0.0;
};

/// Bisection for eigenvalue index k (0-based, ascending). Returns {lo, hi}.
inline std::pair<double, double> bisect_eigenvalue(const TridiagonalOperator& t, std::size_t k, double lo, double hi,
                                                   double pivmin) {
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double tol = 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + pivmin;
    if (hi - lo <= tol || mid <= lo || mid >= hi) break;
    if (detail::sturm_count(t, mid, pivmin) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {lo, hi};
}

/// The `count` smallest eigenpairs of t, ascending.
inline EigenPairs eigs_lowest(const TridiagonalOperator& t, std::size_t count, const EigsOptions& opts = {}) {
  t.validate();
  const std::size_t n = t.size();
  if (count == 0) return {};
  if (count > n) {
    throw size_error("eigs_lowest: requested " + std::to_string(count) + " eigenpairs of a " + std::to_string(n) +
                     "x" + std::to_string(n) + " operator");
  }

  EigenPairs out;
  out.scale = std::max(t.norm_inf(), std::numeric_limits<double>::min());
  const double pivmin = detail::pivot_minimum(t);
  auto [glo, ghi] = t.gershgorin();
  const double pad = 2.0 * std::numeric_limits<double>::epsilon() * out.scale * static_cast<double>(n) + pivmin;
  glo -= pad;
  ghi += pad;

  for (std::size_t k = 0; k < count; ++k) {
    // Previous eigenvalue's lower bracket end is a valid lower bound for this one.
    const double lo0 = out.values.empty() ? glo : out.values.back() - out.bracket_widths.back();
    const auto [lo, hi] = bisect_eigenvalue(t, k, lo0, ghi, pivmin);
    out.values.push_back(0.5 * (lo + hi));
    out.bracket_widths.push_back(hi - lo);
  }

  const double eps = std::numeric_limits<double>::epsilon();
  const double residual_tol = 1e3 * eps * out.scale * std::sqrt(static_cast<double>(n));
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  for (std::size_t k = 0; k < count; ++k) {
    const double lambda = out.values[k];
    std::vector<double> sub(t.off_diagonal), sup(t.off_diagonal), diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = t.diagonal[i] - lambda;
    const TridiagonalLU<double> lu(std::move(sub), std::move(diag), std::move(sup), eps * out.scale);

    std::size_t cluster_start = k;
    while (cluster_start > 0 && lambda - out.values[cluster_start - 1] <= opts.cluster_tolerance * out.scale) {
      --cluster_start;
    }

    bool converged = false;
    std::vector<double> v(n);
    for (int attempt = 0; attempt < opts.restarts && !converged; ++attempt) {
      for (auto& x : v) x = uni(rng);
      for (int it = 0; it < opts.iterations; ++it) {
        lu.solve_in_place(v);
        for (std::size_t j = cluster_start; j < k; ++j) {
          const auto& w = out.vectors[j];
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += w[i] * v[i];
          for (std::size_t i = 0; i < n; ++i) v[i] -= dot * w[i];
        }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
        for (auto& x : v) x /= nrm;
      }
      const auto tv = t.apply(v);
      double res = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < n; ++i) {
        finite = finite && std::isfinite(v[i]);
        res = std::max(res, std::abs(tv[i] - lambda * v[i]));
      }
      converged = finite && res <= residual_tol;
    }
    if (!converged) {
      throw numeric_error("eigs_lowest: inverse iteration did not converge for eigenvalue " + std::to_string(k));
    }

    // Sign convention: first significant component positive.
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    for (double x : v) {
      if (std::abs(x) > 1e-6 * vmax) {
        if (x < 0.0)
          for (auto& y : v) y = -y;
        break;
      }
    }
    out.vectors.push_back(std::move(v));
  }
  return out;
}

}  // namespace gqm
