#pragma once

// Exclusion of period-2 points for the reduced operator.
//
// Eliminating y from W0(W0(z)) = z leaves x*(B1 x^3 + B2 x^2 + B3 x + B4) = 0.
// Its roots x = 0 and x = x* are the fixed points; the remaining quadratic is
// shown to have no admissible positive root by sign inspection, either
// directly (B0 <= 0) or after shifting x -> x + B0 (B0 > 0). Every quadratic
// coefficient is produced twice: by composing the quartic coefficients and by
// the factored closed forms, whose signs are readable.
//
// brute_force_cycle_search is the independent oracle: damped Newton on
// W0^p(z) - z seeded over Omega.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mosqdyn/geometry.hpp"

namespace mosqdyn {

/// Newton iteration cap per seed.
inline constexpr int kNewtonMaxIterations = 100;
/// Distance below which two converged roots are the same point.
inline constexpr double kCycleDedupRadius = 1e-6;

struct CycleCoefficients {
  double A0 = 0, A1 = 0, A2 = 0, A3 = 0, A4 = 0;
  double B1 = 0, B2 = 0, B3 = 0, B4 = 0;
  double B0 = 0;
  double D = 0;  // beta(2 - mu - d0) - mu(2 - mu)
};

/// a*x^2 + b*x + c, stored as {c2, c1, c0}.
struct Quadratic {
  double c2 = 0, c1 = 0, c0 = 0;

  double operator()(double x) const { return (c2 * x + c1) * x + c0; }
  bool all_positive() const { return c2 > 0.0 && c1 > 0.0 && c0 > 0.0; }
};

struct QuadraticRoutes {
  Quadratic composed;     // from the quartic coefficients
  Quadratic closed_form;  // factored expressions
  Quadratic scale;        // sum of |summands| behind each composed coefficient
  /// max_i |composed_i - closed_i| / max(scale_i, |closed_i|)
  double discrepancy = 0.0;
};

namespace detail {

inline void require_cycle_regime(const Params& p) {
  require_w0(p);
  if (!at_threshold(p) && !above_threshold(p))
    throw Error(Errc::PreconditionViolation, "period-2 algebra needs beta >= threshold");
}

/// alpha(beta - mu)/(mu d0) - 1; equals x* above the threshold and ~0 at it.
inline double deflation_root(const Params& p) {
  return p.alpha() * (p.beta() - p.mu()) / (p.mu() * p.d0()) - 1.0;
}

inline double route_discrepancy(const Quadratic& a, const Quadratic& b, const Quadratic& scale) {
  auto rel = [](double u, double v, double s) {
    const double denom = std::max({s, std::abs(v), std::numeric_limits<double>::min()});
    return std::abs(u - v) / denom;
  };
  return std::max({rel(a.c2, b.c2, scale.c2), rel(a.c1, b.c1, scale.c1), rel(a.c0, b.c0, scale.c0)});
}

}  // namespace detail

inline double two_cycle_denominator(const Params& p) {
  const double b = p.beta(), m = p.mu(), d0 = p.d0();
  return b * (2.0 - m - d0) - m * (2.0 - m);
}

/// y as a function of x on any solution of W0(W0(z)) = z, from summing the
/// two component equations.
inline double two_cycle_y_of_x(const Params& p, double x) {
  detail::require_cycle_regime(p);
  if (!(x >= 0.0)) throw Error(Errc::DomainError, "two_cycle_y_of_x needs x >= 0");
  const double a = p.alpha(), b = p.beta(), m = p.mu(), d0 = p.d0();
  return x * (d0 * (2.0 - d0) * (1.0 + x) - a * (b - m + d0)) / ((1.0 + x) * two_cycle_denominator(p));
}

inline CycleCoefficients cycle_coefficients(const Params& p) {
  detail::require_cycle_regime(p);
  const double a = p.alpha(), b = p.beta(), m = p.mu(), d0 = p.d0();
  CycleCoefficients c;
  c.D = two_cycle_denominator(p);
  const double D = c.D;
  c.A0 = 1.0 - d0 + b * d0 * (2.0 - d0) / D;
  c.A1 = 1.0 - a - a * b * (b - m + d0) / D;
  c.A2 = -a * a * (1.0 + b * (b - m + d0) / D);
  c.A3 = m * (2.0 - m) * d0 * (2.0 - d0) / D;
  c.A4 = -(a * (1.0 - m) + a * m * (2.0 - m) * (b - m + d0) / D);
  c.B1 = c.A0 * c.A3;
  c.B2 = 2.0 * c.A0 * c.A3 + c.A1 * c.A3 + c.A0 * c.A4 - a * c.A0;
  c.B3 = c.A0 * c.A3 + c.A1 * c.A3 + c.A3 + c.A0 * c.A4 + c.A1 * c.A4 - 2.0 * a * c.A0 - c.A2;
  c.B4 = c.A3 + c.A4 - a * c.A0 - c.A2;
  c.B0 = a * (b - m + d0) / (d0 * (2.0 - d0)) - 1.0;
  return c;
}

/// x*(B1 x^3 + B2 x^2 + B3 x + B4).
inline double quartic_residual(const Params& p, double x) {
  const auto c = cycle_coefficients(p);
  return x * (((c.B1 * x + c.B2) * x + c.B3) * x + c.B4);
}

/// Sum of |monomials| of the quartic at x; the natural scale for its
/// rounding error.
inline double quartic_scale(const Params& p, double x) {
  const auto c = cycle_coefficients(p);
  const double ax = std::abs(x);
  return ax * (std::abs(c.B1) * ax * ax * ax + std::abs(c.B2) * ax * ax + std::abs(c.B3) * ax + std::abs(c.B4));
}

/// Quartic / (x (x - x*)).
inline QuadraticRoutes reduced_quadratic(const Params& p) {
  const auto c = cycle_coefficients(p);
  const double a = p.alpha(), b = p.beta(), m = p.mu(), d0 = p.d0(), D = c.D;
  const double xs = detail::deflation_root(p);
  const double axs = std::abs(xs);

  QuadraticRoutes r;
  r.composed = {c.B1, c.B2 + c.B1 * xs, c.B3 + c.B2 * xs + c.B1 * xs * xs};

  const double gap = (2.0 - m) * (2.0 - d0) - a * (2.0 + b - m);
  r.closed_form = {c.B1, m * d0 * (b - m) * (2.0 - m) * (2.0 - d0) * gap / (D * D), m * d0 * gap / D};

  const double sB1 = std::abs(c.B1);
  const double sB2 = 2.0 * std::abs(c.A0 * c.A3) + std::abs(c.A1 * c.A3) + std::abs(c.A0 * c.A4) + std::abs(a * c.A0);
  const double sB3 = std::abs(c.A0 * c.A3) + std::abs(c.A1 * c.A3) + std::abs(c.A3) + std::abs(c.A0 * c.A4) +
                     std::abs(c.A1 * c.A4) + std::abs(2.0 * a * c.A0) + std::abs(c.A2);
  r.scale = {sB1, sB2 + sB1 * axs, sB3 + sB2 * axs + sB1 * axs * axs};
  r.discrepancy = detail::route_discrepancy(r.composed, r.closed_form, r.scale);
  return r;
}

/// Reduced quadratic with x -> x + B0. Only meaningful when B0 > 0, where
/// nonnegative y on a period-2 solution forces x >= B0.
inline QuadraticRoutes shifted_quadratic(const Params& p) {
  const auto c = cycle_coefficients(p);
  if (!(c.B0 > 0.0)) throw Error(Errc::BranchError, "shifted quadratic needs B0 > 0");
  const double a = p.alpha(), b = p.beta(), m = p.mu(), d0 = p.d0(), D = c.D, B0 = c.B0;
  const QuadraticRoutes red = reduced_quadratic(p);

  QuadraticRoutes r;
  const Quadratic& q = red.composed;
  r.composed = {q.c2, q.c1 + 2.0 * B0 * q.c2, q.c0 + B0 * q.c1 + B0 * B0 * q.c2};

  const double bm = b - m;
  const double s1 = B0 * c.B1 + m * (2.0 - m) * (d0 * (2.0 - d0) + a * (bm * (1.0 - d0) - d0)) / D;
  const double denom = d0 * (2.0 - d0) * D;
  const double s0 = a * m * (2.0 + bm) * (2.0 - d0) * (1.0 - m) * d0 * d0 / denom +
                    a * a * m * (2.0 - m) * (bm * bm * (1.0 - d0) - (bm + 1.0) * d0 * d0) / denom;
  r.closed_form = {c.B1, s1, s0};

  const Quadratic& s = red.scale;
  r.scale = {s.c2, s.c1 + 2.0 * B0 * s.c2, s.c0 + B0 * s.c1 + B0 * B0 * s.c2};
  r.discrepancy = detail::route_discrepancy(r.composed, r.closed_form, r.scale);
  return r;
}

enum class CycleBranch { B0NonPositive, B0Positive };

constexpr std::string_view to_string(CycleBranch b) {
  return b == CycleBranch::B0Positive ? "B0Positive" : "B0NonPositive";
}

struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct CycleCertificate {
  CycleBranch branch = CycleBranch::B0NonPositive;
  double b0 = 0.0;
  Quadratic coefficients;  // closed-form route of the branch's quadratic
  bool all_positive = false;
  std::vector<InequalityCheck> implied;
  /// Best residual among genuine cycles found by the brute-force oracle;
  /// absent when the oracle was not run or found none.
  std::optional<double> brute_force_residual;

  bool ok() const {
    return all_positive && std::all_of(implied.begin(), implied.end(), [](const auto& c) { return c.holds; });
  }
};

/// Builds the certificate without throwing; ok() reports the verdict.
inline CycleCertificate evaluate_cycle_certificate(const Params& p) {
  const auto c = cycle_coefficients(p);
  const double a = p.alpha(), b = p.beta(), m = p.mu(), d0 = p.d0();
  CycleCertificate cert;
  cert.b0 = c.B0;
  if (c.B0 <= 0.0) {
    cert.branch = CycleBranch::B0NonPositive;
    cert.coefficients = reduced_quadratic(p).closed_form;
    const double gap = (2.0 - m) * (2.0 - d0) - a * (2.0 + b - m);
    cert.implied.push_back({"(2-mu)(2-d0) - alpha(2+beta-mu) >= 0", gap, 0.0, gap >= 0.0});
  } else {
    cert.branch = CycleBranch::B0Positive;
    cert.coefficients = shifted_quadratic(p).closed_form;
    const double bm = b - m;
    const double l1 = bm * (1.0 - d0);
    cert.implied.push_back({"(beta-mu)(1-d0) > d0", l1, d0, l1 > d0});
    const double l2 = bm * bm * (1.0 - d0), r2 = (bm + 1.0) * d0 * d0;
    cert.implied.push_back({"(beta-mu)^2(1-d0) > (beta-mu+1)d0^2", l2, r2, l2 > r2});
  }
  cert.all_positive = cert.coefficients.all_positive();
  return cert;
}

inline CycleCertificate no_cycle_certificate(const Params& p) {
  CycleCertificate cert = evaluate_cycle_certificate(p);
  if (!cert.ok()) throw Error(Errc::CertificateFailure, "a branch coefficient or implied inequality failed");
  return cert;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

namespace detail {

inline Matrix2 matmul(const Matrix2& l, const Matrix2& r) {
  return {l[0] * r[0] + l[1] * r[2], l[0] * r[1] + l[1] * r[3], l[2] * r[0] + l[3] * r[2],
          l[2] * r[1] + l[3] * r[3]};
}

inline Vec2 iterate_map(const Params& p, Vec2 z, int times) {
  for (int i = 0; i < times; ++i) z = w0_map(p, z);
  return z;
}

/// W0^k(z) - z and its Jacobian.
inline std::pair<Vec2, Matrix2> periodic_residual(const Params& p, Vec2 z, int period) {
  Matrix2 J{1.0, 0.0, 0.0, 1.0};
  Vec2 w = z;
  for (int i = 0; i < period; ++i) {
    J = matmul(w0_jacobian(p, w), J);
    w = w0_map(p, w);
  }
  J[0] -= 1.0;
  J[3] -= 1.0;
  return {w - z, J};
}

inline bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

}  // namespace detail

struct NewtonResult {
  Vec2 point;
  double residual = 0.0;  // max-norm of W0^p(z) - z
  int iterations = 0;
};

/// Damped Newton on W0^p(z) - z, projected onto the quadrant. Converges when
/// the residual drops below tol * max(1, |z|); nullopt for divergent or
/// singular seeds.
inline std::optional<NewtonResult> newton_periodic_point(const Params& p, int period, Vec2 seed, double tol,
                                                         int max_iter = kNewtonMaxIterations) {
  require_w0(p);
  auto project = [](Vec2 v) { return Vec2{std::max(v.x, 0.0), std::max(v.y, 0.0)}; };
  Vec2 z = project(seed);
  auto [F, J] = detail::periodic_residual(p, z, period);
  for (int it = 0; it <= max_iter; ++it) {
    const double res = max_norm(F);
    if (!std::isfinite(res)) return std::nullopt;
    if (res < tol * std::max(1.0, max_norm(z))) return NewtonResult{z, res, it};
    if (it == max_iter) break;

    const double det = J[0] * J[3] - J[1] * J[2];
    if (!std::isfinite(det) || det == 0.0) return std::nullopt;
    const Vec2 step{-(J[3] * F.x - J[1] * F.y) / det, -(-J[2] * F.x + J[0] * F.y) / det};

    double lambda = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
      const Vec2 trial = project({z.x + lambda * step.x, z.y + lambda * step.y});
      auto [Ft, Jt] = detail::periodic_residual(p, trial, period);
      if (detail::finite(Ft) && max_norm(Ft) <= res) {
        z = trial;
        F = Ft;
        J = Jt;
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
  }
  return std::nullopt;
}

struct CycleCandidate {
  std::vector<State> orbit;  // rotated so the lexicographically smallest state is first
  double residual = 0.0;
};

/// Seeds Newton from a grid_n x grid_n lattice over Omega (corners
/// included) and returns genuine cycles of least period `period`: fixed
/// points and orbits of a smaller period are filtered out. An empty result
/// is the expected outcome.
inline std::vector<CycleCandidate> brute_force_cycle_search(const Params& p, int period, std::size_t grid_n,
                                                            double tol = 1e-10) {
  require_w0(p);
  if (period < 1) throw Error(Errc::PreconditionViolation, "period must be >= 1");
  const RegionBounds bounds = omega_bounds(p);
  const std::vector<State> known = fixed_points(p);

  const std::size_t n = grid_n * grid_n;
  std::vector<std::optional<NewtonResult>> roots(n);
  parallel_for(n, [&](std::size_t k) {
    const Vec2 seed{lattice_point(bounds.x_max, k % grid_n, grid_n), lattice_point(bounds.y_max, k / grid_n, grid_n)};
    roots[k] = newton_periodic_point(p, period, seed, tol);
  });

  std::vector<CycleCandidate> out;
  for (const auto& root : roots) {
    if (!root) continue;
    const Vec2 z = root->point;
    const bool near_fixed = std::any_of(known.begin(), known.end(), [&](const State& f) {
      return max_norm(f.vec() - z) <= kCycleDedupRadius;
    });
    if (near_fixed) continue;
    bool lower_period = false;
    for (int k = 1; k < period && !lower_period; ++k)
      if (period % k == 0 && max_norm(detail::iterate_map(p, z, k) - z) <= kCycleDedupRadius) lower_period = true;
    if (lower_period) continue;

    std::vector<Vec2> orbit{z};
    for (int k = 1; k < period; ++k) orbit.push_back(w0_map(p, orbit.back()));
    const auto first = std::min_element(orbit.begin(), orbit.end(), [](Vec2 a, Vec2 b) {
      return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    std::rotate(orbit.begin(), first, orbit.end());

    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const CycleCandidate& c) {
      return max_norm(c.orbit.front().vec() - orbit.front()) <= kCycleDedupRadius;
    });
    if (duplicate) continue;
    CycleCandidate cand;
    cand.residual = root->residual;
    for (Vec2 v : orbit) cand.orbit.push_back(State::clamped(v));
    out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace mosqdyn
