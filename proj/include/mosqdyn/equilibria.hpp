#pragma once

// Fixed points of the reduced operator, their Jacobians and eigenvalues, and
// hyperbolicity classification. Two independent routes classify the origin:
// an eigensolve of the Jacobian and the closed-form beta table.

#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "mosqdyn/model.hpp"

namespace mosqdyn {

/// Width of the modulus band around 1 inside which an eigenvalue counts as
/// lying on the unit circle.
inline constexpr double kHyperbolicityTolerance = 1e-9;
/// Relative tolerance for detecting the beta equality cases in closed form.
inline constexpr double kRegimeEqualityTolerance = 1e-12;
/// Max-norm residual below which a state is accepted as a fixed point.
inline constexpr double kFixedPointTolerance = 1e-9;

struct RegimeQuantities {
  double threshold = 0.0;   // mu*(1 + d0/alpha)
  double alpha_star = 0.0;  // (4 - 2(alpha + mu + d0))/alpha
  std::optional<double> x_star;
  std::optional<double> y_star;

  bool has_positive_fixed_point() const noexcept { return x_star.has_value(); }
};

namespace detail {
inline bool nearly_equal_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}
}  // namespace detail

inline double persistence_threshold(const Params& p) { return p.mu() * (1.0 + p.d0() / p.alpha()); }

inline double alpha_star(const Params& p) {
  return (4.0 - 2.0 * (p.alpha() + p.mu() + p.d0())) / p.alpha();
}

/// beta equals the persistence threshold up to kRegimeEqualityTolerance.
inline bool at_threshold(const Params& p) {
  return detail::nearly_equal_rel(p.beta(), persistence_threshold(p), kRegimeEqualityTolerance);
}

/// beta strictly above the threshold, outside the equality band.
inline bool above_threshold(const Params& p) {
  return p.beta() > persistence_threshold(p) && !at_threshold(p);
}

inline RegimeQuantities regime_quantities(const Params& p) {
  require_w0(p);
  RegimeQuantities q;
  q.threshold = persistence_threshold(p);
  q.alpha_star = alpha_star(p);
  if (above_threshold(p)) {
    const double a = p.alpha(), b = p.beta(), m = p.mu(), d0 = p.d0();
    // beta > threshold >= mu, so the y* denominator is nonzero.
    assert(b > m);
    const double xs = a * (b - m) / (m * d0) - 1.0;
    const double ys = (a * (b - m) - m * d0) / (m * (b - m));
    if (xs > 0.0 && ys > 0.0) {
      q.x_star = xs;
      q.y_star = ys;
    }
  }
  return q;
}

/// Row-major 2x2 matrix {a11, a12, a21, a22}.
using Matrix2 = std::array<double, 4>;

/// Jacobian of the reduced operator. Entry (1,2) is beta exactly.
inline Matrix2 jacobian(const Params& p, const State& z) {
  require_w0(p);
  const double s = 1.0 + z.x();
  const double g = p.alpha() / (s * s);
  return {1.0 - p.d0() - g, p.beta(), g, 1.0 - p.mu()};
}

/// Jacobian of the raw map at an arbitrary point with x > -1.
inline Matrix2 w0_jacobian(const Params& p, Vec2 z) {
  const double s = 1.0 + z.x;
  const double g = p.alpha() / (s * s);
  return {1.0 - p.d0() - g, p.beta(), g, 1.0 - p.mu()};
}

/// Eigenvalues ordered by descending modulus, ties by descending real part
/// (then descending imaginary part, so a conjugate pair lists +i first).
struct EigenPair {
  std::complex<double> first;
  std::complex<double> second;

  bool is_real() const noexcept { return first.imag() == 0.0 && second.imag() == 0.0; }
};

inline EigenPair eigenvalues_2x2(const Matrix2& m) {
  const double tr = m[0] + m[3];
  const double det = m[0] * m[3] - m[1] * m[2];
  // (a-d)^2 + 4bc == tr^2 - 4det without the cancellation.
  const double diff = m[0] - m[3];
  const double disc = diff * diff + 4.0 * m[1] * m[2];

  std::complex<double> l1, l2;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double q = 0.5 * (tr + std::copysign(root, tr));
    if (q != 0.0) {
      l1 = q;
      l2 = det / q;
    } else {
      l1 = l2 = 0.0;
    }
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    l1 = {0.5 * tr, im};
    l2 = {0.5 * tr, -im};
  }
  auto before = [](std::complex<double> a, std::complex<double> b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  };
  if (before(l2, l1)) std::swap(l1, l2);
  return {l1, l2};
}

enum class FixedPointClass { Attracting, Repelling, Saddle, NonHyperbolic };

constexpr std::string_view to_string(FixedPointClass c) {
  switch (c) {
    case FixedPointClass::Attracting: return "Attracting";
    case FixedPointClass::Repelling: return "Repelling";
    case FixedPointClass::Saddle: return "Saddle";
    case FixedPointClass::NonHyperbolic: return "NonHyperbolic";
  }
  return "?";
}

inline FixedPointClass classify_eigenvalues(const EigenPair& e, double tol = kHyperbolicityTolerance) {
  const double m1 = std::abs(e.first), m2 = std::abs(e.second);
  if (std::abs(m1 - 1.0) <= tol || std::abs(m2 - 1.0) <= tol) return FixedPointClass::NonHyperbolic;
  if (m1 < 1.0 && m2 < 1.0) return FixedPointClass::Attracting;
  if (m1 > 1.0 && m2 > 1.0) return FixedPointClass::Repelling;
  return FixedPointClass::Saddle;
}

/// Origin classification from the beta table alone: below the threshold the
/// origin attracts; between threshold and threshold + alpha* it is a saddle;
/// above, it repels; equality cases are non-hyperbolic.
inline FixedPointClass classify_origin_regime(const Params& p) {
  require_w0(p);
  const double thr = persistence_threshold(p);
  const double upper = thr + alpha_star(p);
  const double b = p.beta();
  if (detail::nearly_equal_rel(b, thr, kRegimeEqualityTolerance) ||
      detail::nearly_equal_rel(b, upper, kRegimeEqualityTolerance))
    return FixedPointClass::NonHyperbolic;
  if (b < thr) return FixedPointClass::Attracting;
  if (b < upper) return FixedPointClass::Saddle;
  return FixedPointClass::Repelling;
}

/// Eigenvalue-based classification of a fixed point. At the origin, the beta
/// equality cases are detected in closed form first.
inline FixedPointClass classify_fixed_point(const Params& p, const State& z) {
  require_w0(p);
  if (max_norm(w0_map(p, z.vec()) - z.vec()) > kFixedPointTolerance)
    throw Error(Errc::NotAFixedPoint, "state is not a fixed point of the reduced operator");
  if (z.x() == 0.0 && z.y() == 0.0 &&
      classify_origin_regime(p) == FixedPointClass::NonHyperbolic)
    return FixedPointClass::NonHyperbolic;
  return classify_eigenvalues(eigenvalues_2x2(jacobian(p, z)));
}

struct FixedPointInfo {
  State point;
  Matrix2 jacobian{};
  EigenPair eigenvalues;
  FixedPointClass kind = FixedPointClass::NonHyperbolic;
};

struct EquilibriumReport {
  std::vector<FixedPointInfo> fixed_points;  // origin first
  RegimeQuantities regime;
};

/// Known fixed points in the quadrant: the origin, plus (x*, y*) above the
/// threshold.
inline std::vector<State> fixed_points(const Params& p) {
  std::vector<State> out{State(0.0, 0.0)};
  const auto q = regime_quantities(p);
  if (q.has_positive_fixed_point()) out.emplace_back(*q.x_star, *q.y_star);
  return out;
}

inline EquilibriumReport equilibrium_report(const Params& p) {
  EquilibriumReport r;
  r.regime = regime_quantities(p);
  for (const State& z : fixed_points(p)) {
    FixedPointInfo info;
    info.point = z;
    info.jacobian = jacobian(p, z);
    info.eigenvalues = eigenvalues_2x2(info.jacobian);
    info.kind = classify_fixed_point(p, z);
    r.fixed_points.push_back(info);
  }
  return r;
}

}  // namespace mosqdyn
