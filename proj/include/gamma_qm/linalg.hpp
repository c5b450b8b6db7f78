#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gamma_qm/errors.hpp"

namespace gqm {

/// LU factorization of a general tridiagonal matrix with partial pivoting
/// (the xGTTRF scheme: row interchanges introduce a second superdiagonal).
///
/// A zero pivot is replaced by `pivot_floor` when one is given, which is what
/// inverse iteration needs when the shift is an exact eigenvalue; otherwise a
/// zero pivot throws.
template <class T>
class TridiagonalLU {
 public:
  TridiagonalLU(std::vector<T> sub, std::vector<T> diag, std::vector<T> super, double pivot_floor = 0.0)
      : dl_(std::move(sub)), d_(std::move(diag)), du_(std::move(super)) {
    const std::size_t n = d_.size();
    if (n == 0) throw size_error("TridiagonalLU: empty matrix");
    if (dl_.size() + 1 != n || du_.size() + 1 != n) throw size_error("TridiagonalLU: band length mismatch");
    du2_.assign(n > 2 ? n - 2 : 0, T{});
    swapped_.assign(n > 1 ? n - 1 : 0, false);

    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        fix_pivot(d_[i], pivot_floor);
        const T fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        const T fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const T temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        swapped_[i] = true;
      }
    }
    fix_pivot(d_[n - 1], pivot_floor);
  }

  std::size_t size() const noexcept { return d_.size(); }

  /// Overwrites b with the solution of A x = b.
  void solve_in_place(std::span<T> b) const {
    const std::size_t n = d_.size();
    if (b.size() != n) throw size_error("TridiagonalLU::solve: rhs length mismatch");
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const T temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl_[i] * b[i];
      }
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (std::size_t k = n >= 3 ? n - 2 : 0; k-- > 0;) {
      b[k] = (b[k] - du_[k] * b[k + 1] - du2_[k] * b[k + 2]) / d_[k];
    }
  }

  std::vector<T> solve(std::vector<T> b) const {
    solve_in_place(b);
    return b;
  }

 private:
  static void fix_pivot(T& p, double floor) {
    if (p == T{}) {
      if (floor > 0.0) {
        p = T(floor);
      } else {
        throw numeric_error("TridiagonalLU: singular matrix");
      }
    }
  }

  std::vector<T> dl_, d_, du_, du2_;
  std::vector<bool> swapped_;
};

/// Gaussian elimination with partial pivoting for a small dense system.
template <std::size_t N>
std::array<std::complex<double>, N> solve_dense(std::array<std::array<std::complex<double>, N>, N> a,
                                                std::array<std::complex<double>, N> b) {
  double scale = 0.0;
  for (const auto& row : a)
    for (const auto& v : row) scale = std::max(scale, std::abs(v));
  if (!(scale > 0.0) || !std::isfinite(scale)) throw numeric_error("solve_dense: zero or non-finite matrix");

  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) <= 1e-14 * scale) throw numeric_error("solve_dense: singular system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < N; ++r) {
      const auto f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < N; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::array<std::complex<double>, N> x{};
  for (std::size_t k = N; k-- > 0;) {
    auto s = b[k];
    for (std::size_t c = k + 1; c < N; ++c) s -= a[k][c] * x[c];
    x[k] = s / a[k][k];
  }
  return x;
}

}  // namespace gqm
