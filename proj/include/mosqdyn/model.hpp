#pragma once

// Model constants, population state and the one-step evolution operators.
//
// The general operator
//   x' = b*y - a*x/(1+x) - (d0 + d1*x)*x + x
//   y' = a*x/(1+x) - mu*y + y
// and its reduced form (d1 = 0) restricted to the regime where it maps the
// nonnegative quadrant into itself.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mosqdyn/error.hpp"

namespace mosqdyn {

/// Absolute slack within which a rounding-negative coordinate is snapped to 0.
inline constexpr double kClampTolerance = 1e-12;

/// Unconstrained planar point. Used where a value may legitimately leave the
/// nonnegative quadrant (general operator, Newton iterates).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double max_norm(Vec2 v) { return std::max(std::abs(v.x), std::abs(v.y)); }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }

/// Population point: larvae density x and adult density y, both >= 0.
class State {
 public:
  State() = default;
  State(double x, double y) : x_(x), y_(y) {
    if (!std::isfinite(x) || !std::isfinite(y))
      throw Error(Errc::NonFinite, "state coordinates must be finite");
    if (x < 0.0 || y < 0.0)
      throw Error(Errc::DomainError, "state coordinates must be nonnegative");
  }

  /// Snaps coordinates in [-kClampTolerance, 0) to 0; anything more negative
  /// is an error.
  static State clamped(Vec2 v) {
    auto snap = [](double c) { return (c < 0.0 && c >= -kClampTolerance) ? 0.0 : c; };
    return State(snap(v.x), snap(v.y));
  }

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  Vec2 vec() const noexcept { return {x_, y_}; }

  friend bool operator==(const State&, const State&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
};

/// The five model constants. Only obtainable through validate_params, so a
/// Params value always satisfies the general-regime invariants.
class Params {
 public:
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double mu() const noexcept { return mu_; }
  double d0() const noexcept { return d0_; }
  double d1() const noexcept { return d1_; }

  /// True iff 0 < mu <= 1, d0 > 0, alpha + d0 <= 1 and d1 == 0, i.e. the
  /// reduced operator is defined and maps the quadrant into itself.
  bool w0_regime() const noexcept { return w0_; }

  friend Params validate_params(double alpha, double beta, double mu, double d0, double d1);
  friend bool operator==(const Params&, const Params&) = default;

 private:
  Params(double a, double b, double m, double d0, double d1)
      : alpha_(a), beta_(b), mu_(m), d0_(d0), d1_(d1),
        w0_(m <= 1.0 && d0 > 0.0 && a + d0 <= 1.0 && d1 == 0.0) {}

  double alpha_, beta_, mu_, d0_, d1_;
  bool w0_;
};

inline Params validate_params(double alpha, double beta, double mu, double d0, double d1) {
  const std::pair<const char*, double> fields[] = {
      {"alpha", alpha}, {"beta", beta}, {"mu", mu}, {"d0", d0}, {"d1", d1}};
  for (const auto& [name, v] : fields)
    if (!std::isfinite(v)) throw Error(Errc::NonFinite, std::string(name) + " is not finite", name);
  for (const auto& [name, v] : {fields[0], fields[1], fields[2]})
    if (v <= 0.0) throw Error(Errc::NonPositiveRate, std::string(name) + " must be > 0", name);
  for (const auto& [name, v] : {fields[3], fields[4]})
    if (v < 0.0) throw Error(Errc::NegativeDeath, std::string(name) + " must be >= 0", name);
  return Params(alpha, beta, mu, d0, d1);
}

inline void require_w0(const Params& p) {
  if (!p.w0_regime())
    throw Error(Errc::RegimeError,
                "parameters violate 0<mu<=1, d0>0, alpha+d0<=1, d1=0 (reduced operator undefined)");
}

/// k(x) = x/(1+x), the density-dependent emergence fraction.
inline double emergence_response(double x) {
  if (!(x >= 0.0)) throw Error(Errc::DomainError, "emergence_response needs x >= 0");
  return x / (1.0 + x);
}

/// One step of the general operator. The result may leave the quadrant when
/// the parameters are outside the reduced regime, so it is not a State.
inline Vec2 step_general(const Params& p, const State& z) {
  const double x = z.x(), y = z.y();
  const double emerge = p.alpha() * x / (1.0 + x);
  return {p.beta() * y - emerge - (p.d0() + p.d1() * x) * x + x, emerge - p.mu() * y + y};
}

/// Raw reduced-operator arithmetic, valid for any x > -1. No regime or sign
/// checks; callers that need a State go through step_w0.
inline Vec2 w0_map(const Params& p, Vec2 z) {
  return {p.beta() * z.y - (p.alpha() / (1.0 + z.x) + p.d0() - 1.0) * z.x,
          p.alpha() * z.x / (1.0 + z.x) + (1.0 - p.mu()) * z.y};
}

inline State step_w0(const Params& p, const State& z) {
  require_w0(p);
  return State::clamped(w0_map(p, z.vec()));
}

}  // namespace mosqdyn
