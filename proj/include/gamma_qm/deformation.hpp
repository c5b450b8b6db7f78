#pragma once

// Scalar algebra of the non-additive translation x -> x + a + gamma*a*x.
//
// Everything here is a pure function of doubles. The map
//     u(x) = ln(1 + gamma*x) / gamma
// turns the deformed translation into an ordinary one (u -> u + u(a)), which
// is why the q-exponential, the composition law and the coordinate maps all
// live together.

#include <cmath>
#include <string>

#include "gamma_qm/errors.hpp"

namespace gqm {

/// |gamma| below this routes to the exact gamma = 0 formulas.
inline constexpr double kDegenerateGamma = 1e-12;

/// Minimum admissible value of 1 + gamma*x.
inline constexpr double kDomainEpsilon = 1e-12;

inline bool is_degenerate(double gamma) noexcept { return std::abs(gamma) < kDegenerateGamma; }

/// Local stretch factor 1 + gamma*x.
inline double stretch(double x, double gamma) noexcept { return 1.0 + gamma * x; }

inline bool in_intrinsic_domain(double x, double gamma) noexcept {
  return std::isfinite(x) && stretch(x, gamma) > kDomainEpsilon;
}

namespace detail {

inline void require_intrinsic(double x, double gamma, const char* what) {
  if (!in_intrinsic_domain(x, gamma)) {
    throw domain_error(std::string(what) + ": 1 + gamma*x must exceed " +
                       std::to_string(kDomainEpsilon) + " (x = " + std::to_string(x) +
                       ", gamma = " + std::to_string(gamma) + ")");
  }
}

}  // namespace detail

/// q-exponential [1 + gamma*x]^(1/gamma); exp(x) at gamma = 0.
/// Satisfies qexp(g, a) * qexp(g, b) == qexp(g, a + b + g*a*b).
inline double qexp(double gamma, double x) {
  if (is_degenerate(gamma)) return std::exp(x);
  detail::require_intrinsic(x, gamma, "qexp");
  return std::exp(std::log1p(gamma * x) / gamma);
}

/// Image of x under the deformed translation by a.
inline double translate_point(double x, double a, double gamma) {
  detail::require_intrinsic(x, gamma, "translate_point");
  const double y = x + a + gamma * a * x;
  detail::require_intrinsic(y, gamma, "translate_point (result)");
  return y;
}

/// Inverse of translate_point: returns (x - dx) / (1 + gamma*dx).
inline double inverse_translate(double x, double dx, double gamma) {
  const double s = stretch(dx, gamma);
  if (!(s > kDomainEpsilon)) {
    throw domain_error("inverse_translate: 1 + gamma*dx must be positive");
  }
  return (x - dx) / s;
}

/// Displacement equivalent to translating by dx1 and then by dx2.
/// Exact algebra; symmetric in its arguments.
inline double compose_displacements(double dx1, double dx2, double gamma) noexcept {
  return dx1 + dx2 + gamma * dx1 * dx2;
}

/// u = ln(1 + gamma*x)/gamma, the coordinate in which the deformed derivative is d/du.
inline double coord_to_u(double x, double gamma) {
  if (is_degenerate(gamma)) return x;
  detail::require_intrinsic(x, gamma, "coord_to_u");
  return std::log1p(gamma * x) / gamma;
}

/// x = (exp(gamma*u) - 1)/gamma, exact inverse of coord_to_u.
inline double coord_to_x(double u, double gamma) {
  if (is_degenerate(gamma)) return u;
  if (!std::isfinite(u)) throw domain_error("coord_to_x: u must be finite");
  return std::expm1(gamma * u) / gamma;
}

/// m / (1 + gamma*x)^2.
inline double effective_mass(double x, double gamma, double mass) {
  detail::require_intrinsic(x, gamma, "effective_mass");
  const double s = stretch(x, gamma);
  return mass / (s * s);
}

}  // namespace gqm
