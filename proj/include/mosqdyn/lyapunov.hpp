#pragma once

// phi(x, y) = mu*x + beta*y and its one-step increment under the reduced
// operator. Above the threshold phi grows on Omega1 and shrinks on Omega2;
// at the threshold it shrinks on all of Omega.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "mosqdyn/geometry.hpp"

namespace mosqdyn {

/// Absolute slack for the monotonicity sign checks.
inline constexpr double kMonotonicityTolerance = 1e-12;

inline double phi(const Params& p, const State& z) {
  require_w0(p);
  return p.mu() * z.x() + p.beta() * z.y();
}

/// Closed-form phi(W0(z)) - phi(z). Reads only x.
///   beta at threshold:    -d0*mu*x^2/(1+x)
///   beta above threshold: d0*mu*x/(1+x) * (x* - x)
///   otherwise:            (beta - mu)*alpha*x/(1+x) - d0*mu*x
inline double delta_phi_closed(const Params& p, const State& z) {
  require_w0(p);
  const double x = z.x();
  const double d0mu = p.d0() * p.mu();
  if (at_threshold(p)) return -d0mu * x * x / (1.0 + x);
  if (above_threshold(p)) {
    const double xs = p.alpha() * (p.beta() - p.mu()) / d0mu - 1.0;
    return d0mu * x / (1.0 + x) * (xs - x);
  }
  return (p.beta() - p.mu()) * p.alpha() * x / (1.0 + x) - d0mu * x;
}

inline double delta_phi_direct(const Params& p, const State& z) {
  return phi(p, step_w0(p, z)) - phi(p, z);
}

struct LyapunovSample {
  State z;
  double phi = 0.0;
  double delta_closed = 0.0;
  double delta_direct = 0.0;
  RegionLabel region = RegionLabel::OmegaOnly;
};

inline LyapunovSample lyapunov_sample(const Params& p, const State& z) {
  return {z, phi(p, z), delta_phi_closed(p, z), delta_phi_direct(p, z), region_of(p, z)};
}

enum class ExpectedSign { NonNegative, NonPositive };

struct RegionMonotonicity {
  RegionLabel region = RegionLabel::OmegaOnly;
  ExpectedSign expected = ExpectedSign::NonPositive;
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// Sample whose direct increment goes furthest against the expected sign.
  std::optional<LyapunovSample> worst;
};

struct MonotonicityReport {
  std::vector<RegionMonotonicity> regions;

  std::size_t total_violations() const {
    std::size_t n = 0;
    for (const auto& r : regions) n += r.violations;
    return n;
  }
  bool ok() const { return total_violations() == 0; }
};

namespace detail {

inline RegionMonotonicity sample_monotonicity(const Params& p, const Box& box, RegionLabel region,
                                              ExpectedSign expected, std::size_t n, const CounterRng& rng) {
  // Signed so that a positive value means "against the expected sign".
  auto offence = [expected](double delta) { return expected == ExpectedSign::NonNegative ? -delta : delta; };

  struct Partial {
    std::size_t violations = 0;
    std::optional<LyapunovSample> worst;
  };
  auto partials = parallel_chunks(n, [&](std::size_t b, std::size_t e, std::size_t) {
    Partial part;
    for (std::size_t i = b; i < e; ++i) {
      const State z(rng.uniform(i, 0, box.x_lo, box.x_hi), rng.uniform(i, 1, box.y_lo, box.y_hi));
      LyapunovSample s = lyapunov_sample(p, z);
      const double off = offence(s.delta_direct);
      if (off > kMonotonicityTolerance) ++part.violations;
      if (!part.worst || off > offence(part.worst->delta_direct)) part.worst = s;
    }
    return part;
  });

  RegionMonotonicity out{region, expected, n, 0, std::nullopt};
  for (auto& part : partials) {
    out.violations += part.violations;
    if (part.worst && (!out.worst || offence(part.worst->delta_direct) > offence(out.worst->delta_direct)))
      out.worst = part.worst;
  }
  return out;
}

}  // namespace detail

/// Samples the regions where the increment has a known sign and counts
/// samples whose direct increment breaks it by more than
/// kMonotonicityTolerance. Requires beta >= threshold.
inline MonotonicityReport monotonicity_report(const Params& p, std::size_t n_samples, std::uint64_t seed) {
  require_w0(p);
  if (!at_threshold(p) && !above_threshold(p))
    throw Error(Errc::PreconditionViolation, "monotonicity claims need beta >= threshold");
  MonotonicityReport report;
  if (n_samples == 0) return report;

  const RegionBounds bounds = omega_bounds(p);
  const CounterRng rng(seed);
  if (!bounds.subdivided()) {
    report.regions.push_back(detail::sample_monotonicity(p, region_box(bounds, RegionLabel::OmegaOnly),
                                                         RegionLabel::OmegaOnly, ExpectedSign::NonPositive,
                                                         n_samples, rng.split(0)));
  } else {
    report.regions.push_back(detail::sample_monotonicity(p, region_box(bounds, RegionLabel::Omega1),
                                                         RegionLabel::Omega1, ExpectedSign::NonNegative,
                                                         n_samples, rng.split(1)));
    report.regions.push_back(detail::sample_monotonicity(p, region_box(bounds, RegionLabel::Omega2),
                                                         RegionLabel::Omega2, ExpectedSign::NonPositive,
                                                         n_samples, rng.split(2)));
  }
  return report;
}

}  // namespace mosqdyn
