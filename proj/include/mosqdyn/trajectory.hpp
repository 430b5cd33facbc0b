#pragma once

// Orbit iteration, omega-limit classification and basin rasters.

#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "mosqdyn/lyapunov.hpp"

namespace mosqdyn {

enum class OmegaLimitClass { ConvergedToOrigin, ConvergedToPositiveFixedPoint, EscapeXUnbounded, Undetermined };

constexpr std::string_view to_string(OmegaLimitClass c) {
  switch (c) {
    case OmegaLimitClass::ConvergedToOrigin: return "ConvergedToOrigin";
    case OmegaLimitClass::ConvergedToPositiveFixedPoint: return "ConvergedToPositiveFixedPoint";
    case OmegaLimitClass::EscapeXUnbounded: return "EscapeXUnbounded";
    case OmegaLimitClass::Undetermined: return "Undetermined";
  }
  return "?";
}

/// Numeric code used in basin CSV output.
constexpr int class_code(OmegaLimitClass c) {
  switch (c) {
    case OmegaLimitClass::ConvergedToOrigin: return 0;
    case OmegaLimitClass::ConvergedToPositiveFixedPoint: return 1;
    case OmegaLimitClass::EscapeXUnbounded: return 2;
    case OmegaLimitClass::Undetermined: return 3;
  }
  return 3;
}

struct OrbitSample {
  std::size_t n = 0;
  State z;
  double phi = 0.0;
  RegionLabel region = RegionLabel::OmegaOnly;
};

struct TrajectoryReport {
  std::vector<OrbitSample> samples;  // strictly increasing n; last one is `final`
  std::size_t iterations_used = 0;
  State final;
  OmegaLimitClass limit = OmegaLimitClass::Undetermined;
  /// beta sits at the threshold, where convergence to the origin is algebraic.
  bool boundary_regime = false;
};

struct IterationBudget {
  std::size_t max_iter;
  double tol;
};

/// Default budgets. The origin is non-hyperbolic at the threshold, so the
/// geometric defaults are swapped for a long, loose budget there.
inline IterationBudget default_budget(const Params& p) {
  if (at_threshold(p)) return {10'000'000, 1e-6};
  return {1'000'000, 1e-10};
}

/// Orbits that exit Omega to the right while y stays above alpha/mu are
/// declared escaping once x passes this multiple of x_max.
inline constexpr double kEscapeFactor = 10.0;

/// Applies the reduced operator from z0 until one of:
///  - the step |z_{n+1} - z_n| < tol and z_n lies within 10*tol of a fixed
///    point (class follows that fixed point);
///  - y_n > alpha/mu held for every n so far and x_n > 10*x_max (escape);
///  - max_iter steps were taken (Undetermined).
inline TrajectoryReport iterate(const Params& p, const State& z0, std::size_t max_iter, double tol,
                                std::size_t stride) {
  require_w0(p);
  if (!(tol > 0.0)) throw Error(Errc::PreconditionViolation, "tol must be > 0");
  if (stride == 0) throw Error(Errc::PreconditionViolation, "stride must be >= 1");

  const RegionBounds bounds = omega_bounds(p);
  const std::vector<State> fixed = fixed_points(p);
  const double escape_bound = kEscapeFactor * bounds.x_max;

  TrajectoryReport r;
  r.boundary_regime = at_threshold(p);
  auto record = [&](std::size_t n, const State& z) {
    r.samples.push_back({n, z, phi(p, z), region_of(bounds, z)});
  };

  bool y_above = true;
  State z = z0;
  std::size_t n = 0;
  for (;; ++n) {
    if (n % stride == 0) record(n, z);
    y_above = y_above && z.y() > bounds.y_max;
    if (y_above && z.x() > escape_bound) {
      r.limit = OmegaLimitClass::EscapeXUnbounded;
      break;
    }
    if (n == max_iter) break;
    const State next = step_w0(p, z);
    if (max_norm(next.vec() - z.vec()) < tol) {
      std::optional<std::size_t> hit;
      for (std::size_t k = 0; k < fixed.size(); ++k)
        if (max_norm(fixed[k].vec() - z.vec()) <= 10.0 * tol &&
            (!hit || max_norm(fixed[k].vec() - z.vec()) < max_norm(fixed[*hit].vec() - z.vec())))
          hit = k;
      if (hit) {
        r.limit = *hit == 0 ? OmegaLimitClass::ConvergedToOrigin : OmegaLimitClass::ConvergedToPositiveFixedPoint;
        break;
      }
    }
    z = next;
  }
  if (r.samples.back().n != n) record(n, z);
  r.iterations_used = n;
  r.final = z;
  return r;
}

inline TrajectoryReport iterate(const Params& p, const State& z0) {
  const auto b = default_budget(p);
  return iterate(p, z0, b.max_iter, b.tol, std::numeric_limits<std::size_t>::max());
}

struct EscapeProbeReport {
  bool y_stayed_above = false;
  bool x_monotone_increasing_tail = false;
  double y_gap_final = 0.0;  // y_final - alpha/mu
  std::optional<std::size_t> first_dip;  // first n with y_n <= alpha/mu
  State final;
};

/// Runs `horizon` steps from a start above the adult ceiling alpha/mu and
/// reports whether y stayed above it, whether x strictly increases over the
/// last 10% of steps, and the final gap y - alpha/mu. When y dips, the orbit
/// has entered the bounded regime and belongs to iterate().
inline EscapeProbeReport escape_probe(const Params& p, const State& z0, std::size_t horizon) {
  require_w0(p);
  const double ceiling = p.alpha() / p.mu();
  if (!(z0.y() > ceiling))
    throw Error(Errc::PreconditionViolation, "escape_probe needs y0 > alpha/mu");

  EscapeProbeReport r;
  const std::size_t tail_start = horizon - horizon / 10;
  bool increasing = true;
  State z = z0;
  for (std::size_t n = 1; n <= horizon; ++n) {
    const State next = step_w0(p, z);
    if (n > tail_start && !(next.x() > z.x())) increasing = false;
    z = next;
    if (!r.first_dip && !(z.y() > ceiling)) r.first_dip = n;
  }
  r.y_stayed_above = !r.first_dip.has_value();
  r.x_monotone_increasing_tail = horizon >= 10 && increasing;
  r.y_gap_final = z.y() - ceiling;
  r.final = z;
  return r;
}

struct BasinRaster {
  std::size_t grid_n = 0;
  std::vector<OmegaLimitClass> cells;  // row-major, row j = y index, column i = x index

  OmegaLimitClass at(std::size_t i, std::size_t j) const { return cells[j * grid_n + i]; }
};

/// Classifies a grid_n x grid_n lattice of starts spanning Omega, corners
/// included.
inline BasinRaster basin_raster(const Params& p, std::size_t grid_n, std::size_t max_iter, double tol) {
  require_w0(p);
  const RegionBounds bounds = omega_bounds(p);
  BasinRaster raster{grid_n, std::vector<OmegaLimitClass>(grid_n * grid_n, OmegaLimitClass::Undetermined)};
  parallel_for(grid_n * grid_n, [&](std::size_t k) {
    const State z0(lattice_point(bounds.x_max, k % grid_n, grid_n), lattice_point(bounds.y_max, k / grid_n, grid_n));
    raster.cells[k] = iterate(p, z0, max_iter, tol, std::numeric_limits<std::size_t>::max()).limit;
  });
  return raster;
}

}  // namespace mosqdyn
