#pragma once

// Shared fixtures for the test suites: the reference parameter sets and a
// seeded generator over the valid parameter box.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <vector>

#include "mosqdyn/mosqdyn.hpp"

namespace mosqdyn::testing {

/// Reference tuple: persistence regime, origin a saddle, (x*, y*) = (1.5, 0.375).
inline Params p0() { return validate_params(0.5, 2.0, 0.8, 0.3, 0.0); }
/// Same constants with beta exactly at the threshold mu(1 + d0/alpha) = 1.28.
inline Params boundary() { return validate_params(0.5, 1.28, 0.8, 0.3, 0.0); }
/// Extinction regime.
inline Params extinction() { return validate_params(0.5, 1.0, 0.8, 0.3, 0.0); }
/// Above the threshold with B0 < 0 (found by a grid scan, see test_cycles).
inline Params b0_negative() { return validate_params(0.5, 1.4, 0.8, 0.3, 0.0); }

enum class BetaRange {
  Above,          // threshold < beta <= threshold + 3 mu
  AboveOrAt,      // as Above, but every 8th draw sits exactly at the threshold
  Anywhere,       // (0.01, threshold + alpha* + 2]
};

/// Draw k from the parameter box alpha in [0.1, 0.9], d0 in [0.1, 1 - alpha],
/// mu in [0.1, 1], d1 = 0. The box keeps x* below ~30, so absolute
/// tolerances near 1e-12 stay above the rounding floor.
inline Params random_params(const CounterRng& rng, std::uint64_t k, BetaRange range) {
  const double a = rng.uniform(k, 0, 0.1, 0.9);
  const double d0 = rng.uniform(k, 1, 0.1, std::max(0.1, 1.0 - a));
  const double m = rng.uniform(k, 2, 0.1, 1.0);
  const double thr = m * (1.0 + d0 / a);
  double b = 0.0;
  switch (range) {
    case BetaRange::Above:
      b = thr + 3.0 * m * rng.uniform(k, 3, 1e-6, 1.0);
      break;
    case BetaRange::AboveOrAt:
      b = (k % 8 == 7) ? thr : thr + 3.0 * m * rng.uniform(k, 3, 1e-6, 1.0);
      break;
    case BetaRange::Anywhere: {
      const double upper = thr + (4.0 - 2.0 * (a + m + d0)) / a;
      b = rng.uniform(k, 3, 0.01, upper + 2.0);
      break;
    }
  }
  return validate_params(a, b, m, std::min(d0, 1.0 - a), 0.0);
}

/// Uniform point in [0, x_hi] x [0, y_hi].
inline State random_state(const CounterRng& rng, std::uint64_t k, double x_hi, double y_hi) {
  return State(rng.uniform(k, 10, 0.0, x_hi), rng.uniform(k, 11, 0.0, y_hi));
}

/// Distance in units in the last place between two doubles.
inline std::uint64_t ulp_distance(double a, double b) {
  if (a == b) return 0;
  auto key = [](double v) {
    std::int64_t i;
    std::memcpy(&i, &v, sizeof i);
    return i < 0 ? std::numeric_limits<std::int64_t>::min() - i : i;
  };
  const std::int64_t ka = key(a), kb = key(b);
  return ka > kb ? static_cast<std::uint64_t>(ka - kb) : static_cast<std::uint64_t>(kb - ka);
}

}  // namespace mosqdyn::testing
