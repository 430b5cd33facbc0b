#pragma once

// The bounded-dynamics rectangle Omega = [0, ab/(mu d0)] x [0, a/mu], its
// subdivision at the positive fixed point, and sampled invariance checks.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mosqdyn/equilibria.hpp"
#include "mosqdyn/sampling.hpp"

namespace mosqdyn {

/// Absolute slack allowed when checking that an image stays in a region.
inline constexpr double kInvarianceTolerance = 1e-12;

enum class RegionLabel { Omega1, Omega2, Omega3, Omega4, OmegaOnly, OutsideOmega };

constexpr std::string_view to_string(RegionLabel r) {
  switch (r) {
    case RegionLabel::Omega1: return "Omega1";
    case RegionLabel::Omega2: return "Omega2";
    case RegionLabel::Omega3: return "Omega3";
    case RegionLabel::Omega4: return "Omega4";
    case RegionLabel::OmegaOnly: return "OmegaOnly";
    case RegionLabel::OutsideOmega: return "OutsideOmega";
  }
  return "?";
}

struct RegionBounds {
  double x_max = 0.0;
  double y_max = 0.0;
  std::optional<double> x_star;
  std::optional<double> y_star;

  bool subdivided() const noexcept { return x_star.has_value(); }
};

inline RegionBounds omega_bounds(const Params& p) {
  const auto q = regime_quantities(p);
  return {p.alpha() * p.beta() / (p.mu() * p.d0()), p.alpha() / p.mu(), q.x_star, q.y_star};
}

/// Omega1, Omega2, Omega3, Omega4 are tested in that order and the first
/// match wins, so the closed boxes Omega1/Omega2 keep their shared corner and
/// edges. Without a positive fixed point Omega is not subdivided.
inline RegionLabel region_of(const RegionBounds& b, const State& z) {
  const double x = z.x(), y = z.y();
  if (x > b.x_max || y > b.y_max) return RegionLabel::OutsideOmega;
  if (!b.subdivided()) return RegionLabel::OmegaOnly;
  const double xs = *b.x_star, ys = *b.y_star;
  if (x <= xs && y <= ys) return RegionLabel::Omega1;
  if (x >= xs && y >= ys) return RegionLabel::Omega2;
  if (x > xs && y <= ys) return RegionLabel::Omega3;
  return RegionLabel::Omega4;
}

inline RegionLabel region_of(const Params& p, const State& z) { return region_of(omega_bounds(p), z); }

/// Lattice coordinate i of grid_n points spanning [0, hi].
inline double lattice_point(double hi, std::size_t i, std::size_t grid_n) {
  return grid_n <= 1 ? 0.0 : hi * static_cast<double>(i) / static_cast<double>(grid_n - 1);
}

/// Axis-aligned box [x_lo, x_hi] x [y_lo, y_hi].
struct Box {
  double x_lo, x_hi, y_lo, y_hi;

  /// Largest signed distance by which v lies past a face; <= 0 means inside.
  double excursion(Vec2 v) const {
    return std::max({x_lo - v.x, v.x - x_hi, y_lo - v.y, v.y - y_hi});
  }
};

/// The closed box of an invariant region. OmegaOnly stands for all of Omega.
inline Box region_box(const RegionBounds& b, RegionLabel region) {
  switch (region) {
    case RegionLabel::OmegaOnly: return {0.0, b.x_max, 0.0, b.y_max};
    case RegionLabel::Omega1:
    case RegionLabel::Omega2:
      if (!b.subdivided())
        throw Error(Errc::PreconditionViolation, "Omega1/Omega2 need beta above the threshold");
      return region == RegionLabel::Omega1 ? Box{0.0, *b.x_star, 0.0, *b.y_star}
                                           : Box{*b.x_star, b.x_max, *b.y_star, b.y_max};
    case RegionLabel::Omega3:
    case RegionLabel::Omega4:
      throw Error(Errc::NotClaimedInvariant, std::string(to_string(region)) + " is not claimed invariant");
    default:
      throw Error(Errc::PreconditionViolation, "no invariant box for this label");
  }
}

struct InvarianceViolation {
  std::size_t sample_index = 0;
  State point;
  Vec2 image;
  double excursion = 0.0;
};

struct InvarianceReport {
  RegionLabel region = RegionLabel::OmegaOnly;
  std::size_t n_samples = 0;
  std::vector<InvarianceViolation> violations;  // sorted by sample_index
  double max_excursion = 0.0;                   // signed; <= 0 when every image is inside

  bool ok() const noexcept { return violations.empty(); }
};

/// Samples n points uniformly in the region's box, maps each once, and
/// records images outside the box by more than kInvarianceTolerance.
/// The bounds are taken as given, which lets callers probe a perturbed box.
inline InvarianceReport check_invariance(const Params& p, const RegionBounds& bounds, RegionLabel region,
                                         std::size_t n_samples, std::uint64_t seed) {
  require_w0(p);
  const Box box = region_box(bounds, region);
  const CounterRng rng(seed);

  struct Partial {
    std::vector<InvarianceViolation> violations;
    double max_excursion = -std::numeric_limits<double>::infinity();
  };
  auto partials = parallel_chunks(n_samples, [&](std::size_t b, std::size_t e, std::size_t) {
    Partial part;
    for (std::size_t i = b; i < e; ++i) {
      const State z(rng.uniform(i, 0, box.x_lo, box.x_hi), rng.uniform(i, 1, box.y_lo, box.y_hi));
      const Vec2 img = w0_map(p, z.vec());
      const double exc = box.excursion(img);
      part.max_excursion = std::max(part.max_excursion, exc);
      if (exc > kInvarianceTolerance) part.violations.push_back({i, z, img, exc});
    }
    return part;
  });

  InvarianceReport r;
  r.region = region;
  r.n_samples = n_samples;
  r.max_excursion = n_samples == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  for (auto& part : partials) {
    r.max_excursion = std::max(r.max_excursion, part.max_excursion);
    r.violations.insert(r.violations.end(), part.violations.begin(), part.violations.end());
  }
  return r;
}

inline InvarianceReport check_invariance(const Params& p, RegionLabel region, std::size_t n_samples,
                                         std::uint64_t seed) {
  require_w0(p);
  if (region == RegionLabel::Omega3 || region == RegionLabel::Omega4)
    throw Error(Errc::NotClaimedInvariant, std::string(to_string(region)) + " is not claimed invariant");
  if ((region == RegionLabel::Omega1 || region == RegionLabel::Omega2) && !above_threshold(p))
    throw Error(Errc::PreconditionViolation, "Omega1/Omega2 need beta above the threshold");
  return check_invariance(p, omega_bounds(p), region, n_samples, seed);
}

}  // namespace mosqdyn
