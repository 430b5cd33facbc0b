#include <gtest/gtest.h>

#include "support.hpp"

namespace mosqdyn {
namespace {

using testing::boundary;
using testing::extinction;
using testing::p0;

constexpr std::size_t kEvery = std::numeric_limits<std::size_t>::max();

TEST(Iterate, StartAtFixedPointStopsImmediately) {
  const auto r = iterate(p0(), State(1.5, 0.375), 1000, 1e-10, 1);
  EXPECT_EQ(r.limit, OmegaLimitClass::ConvergedToPositiveFixedPoint);
  EXPECT_EQ(r.iterations_used, 0u);
  ASSERT_EQ(r.samples.size(), 1u);
  EXPECT_FALSE(r.boundary_regime);
}

TEST(Iterate, ReferenceOrbitConverges) {
  const auto r = iterate(p0(), State(1, 0.5), 1'000'000, 1e-10, 1);
  EXPECT_EQ(r.limit, OmegaLimitClass::ConvergedToPositiveFixedPoint);
  EXPECT_NEAR(r.final.x(), 1.5, 1e-9);
  EXPECT_NEAR(r.final.y(), 0.375, 1e-9);

  // Oracle: the raw recurrence, stopped with the same rule.
  double x = 1, y = 0.5;
  std::size_t n = 0;
  for (;; ++n) {
    const double nx = 2 * y - (0.5 / (1 + x) + 0.3 - 1) * x;
    const double ny = 0.5 * x / (1 + x) + 0.2 * y;
    if (std::max(std::abs(nx - x), std::abs(ny - y)) < 1e-10 &&
        std::max(std::abs(x - 1.5), std::abs(y - 0.375)) <= 1e-9)
      break;
    x = nx;
    y = ny;
  }
  EXPECT_EQ(r.iterations_used, n);
  EXPECT_NEAR(r.final.x(), x, 1e-14);
  EXPECT_NEAR(r.final.y(), y, 1e-14);
}

TEST(Iterate, BoundaryOrbitGoesToOrigin) {
  const auto r = iterate(boundary(), State(0.5, 0.3));
  EXPECT_EQ(r.limit, OmegaLimitClass::ConvergedToOrigin);
  EXPECT_TRUE(r.boundary_regime);
  EXPECT_LE(max_norm(r.final.vec()), 1e-5);
}

TEST(Iterate, ExtinctionOrbitGoesToOrigin) {
  EXPECT_EQ(iterate(extinction(), State(2, 0.5)).limit, OmegaLimitClass::ConvergedToOrigin);
}

TEST(Iterate, BudgetExhaustionIsUndetermined) {
  const auto r = iterate(p0(), State(4, 0.6), 5, 1e-10, 2);
  EXPECT_EQ(r.limit, OmegaLimitClass::Undetermined);
  EXPECT_EQ(r.iterations_used, 5u);
  std::vector<std::size_t> ns;
  for (const auto& s : r.samples) ns.push_back(s.n);
  EXPECT_EQ(ns, (std::vector<std::size_t>{0, 2, 4, 5}));
  EXPECT_EQ(r.samples.back().z, r.final);
}

TEST(Iterate, EscapeSentinelFires) {
  // Large enough y keeps y above alpha/mu long enough for x to pass 10 x_max.
  const auto r = iterate(p0(), State(0, 200), 1000, 1e-10, kEvery);
  EXPECT_EQ(r.limit, OmegaLimitClass::EscapeXUnbounded);
  EXPECT_GT(r.final.x(), 10 * omega_bounds(p0()).x_max);
  EXPECT_GT(r.final.y(), 0.625);
}

TEST(Iterate, Preconditions) {
  EXPECT_THROW(iterate(p0(), State(1, 1), 10, 0.0, 1), Error);
  EXPECT_THROW(iterate(p0(), State(1, 1), 10, 1e-9, 0), Error);
}

TEST(Iterate, SamplesStrictlyIncreasingAndCarryRegion) {
  const auto r = iterate(p0(), State(3, 0.1), 200, 1e-12, 7);
  for (std::size_t i = 1; i < r.samples.size(); ++i) ASSERT_LT(r.samples[i - 1].n, r.samples[i].n);
  for (const auto& s : r.samples) {
    EXPECT_EQ(s.region, region_of(p0(), s.z));
    EXPECT_EQ(s.phi, phi(p0(), s.z));
  }
}

TEST(Iterate, GlobalConvergenceFromRandomStarts) {
  const CounterRng rng(51);
  const auto b = omega_bounds(p0());
  for (std::uint64_t k = 0; k < 200; ++k) {
    const State z0 = testing::random_state(rng, k, b.x_max, b.y_max);
    const auto r = iterate(p0(), z0, 1'000'000, 1e-8, kEvery);
    ASSERT_EQ(r.limit, OmegaLimitClass::ConvergedToPositiveFixedPoint) << k;
    ASSERT_LE(max_norm(r.final.vec() - Vec2{1.5, 0.375}), 1e-7);
  }
}

// Along orbits: in Omega3 x does not increase and y does not decrease;
// mirrored in Omega4. In Omega1/Omega2 phi moves with the region sign.
TEST(Iterate, OrbitSegmentProperties) {
  const CounterRng rng(52);
  std::size_t omega34 = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const Params p = testing::random_params(rng, k, testing::BetaRange::Above);
    const auto b = omega_bounds(p);
    for (std::uint64_t j = 0; j < 20; ++j) {
      const auto r = iterate(p, testing::random_state(rng, k * 100 + j, b.x_max, b.y_max), 400, 1e-12, 1);
      for (std::size_t i = 0; i + 1 < r.samples.size(); ++i) {
        const auto& s = r.samples[i];
        const auto& t = r.samples[i + 1];
        const double dx = t.z.x() - s.z.x(), dy = t.z.y() - s.z.y(), dphi = t.phi - s.phi;
        switch (s.region) {
          case RegionLabel::Omega3:
            ++omega34;
            ASSERT_LE(dx, 1e-12);
            ASSERT_GE(dy, -1e-12);
            break;
          case RegionLabel::Omega4:
            ++omega34;
            ASSERT_GE(dx, -1e-12);
            ASSERT_LE(dy, 1e-12);
            break;
          case RegionLabel::Omega1: ASSERT_GE(dphi, -1e-12); break;
          case RegionLabel::Omega2: ASSERT_LE(dphi, 1e-12); break;
          default: FAIL() << "orbit left Omega";
        }
      }
    }
  }
  EXPECT_GT(omega34, 0u);
}

// The gap g = y - alpha/mu obeys g' = (1 - mu) g - alpha/(1 + x); starting
// from (0, 10) it turns negative at n = 4 for the reference tuple.
TEST(EscapeProbe, ReferenceStartDipsBelowCeiling) {
  double x = 0, y = 10;
  std::optional<std::size_t> dip;
  for (std::size_t n = 1; n <= 10 && !dip; ++n) {
    const double nx = 2 * y - (0.5 / (1 + x) + 0.3 - 1) * x;
    y = 0.5 * x / (1 + x) + 0.2 * y;
    x = nx;
    if (y <= 0.625) dip = n;
  }
  ASSERT_EQ(dip, std::optional<std::size_t>(4));

  const auto r = escape_probe(p0(), State(0, 10), 100'000);
  EXPECT_FALSE(r.y_stayed_above);
  EXPECT_EQ(r.first_dip, dip);
  // Handed over to the bounded regime, the orbit settles at (x*, y*).
  EXPECT_NEAR(r.y_gap_final, 0.375 - 0.625, 1e-12);
  EXPECT_EQ(iterate(p0(), State(0, 10)).limit, OmegaLimitClass::ConvergedToPositiveFixedPoint);
}

TEST(EscapeProbe, ExtinctionRegimeDips) {
  const auto r = escape_probe(extinction(), State(0, 10), 100'000);
  EXPECT_FALSE(r.y_stayed_above);
  EXPECT_TRUE(r.first_dip.has_value());
  EXPECT_EQ(iterate(extinction(), r.final).limit, OmegaLimitClass::ConvergedToOrigin);
}

TEST(EscapeProbe, GuardsStartBelowCeiling) {
  try {
    escape_probe(p0(), State(0, 0.625), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::PreconditionViolation);
  }
}

TEST(EscapeProbe, ShortHorizonTailIsNotMonotone) {
  const auto r = escape_probe(p0(), State(0, 200), 5);
  EXPECT_TRUE(r.y_stayed_above);
  EXPECT_FALSE(r.x_monotone_increasing_tail);
}

TEST(BasinRaster, ReferenceTupleIsSingleColourMinusOrigin) {
  const auto r = basin_raster(p0(), 64, 1'000'000, 1e-10);
  ASSERT_EQ(r.cells.size(), 64u * 64u);
  EXPECT_EQ(r.at(0, 0), OmegaLimitClass::ConvergedToOrigin);
  for (std::size_t k = 1; k < r.cells.size(); ++k)
    ASSERT_EQ(r.cells[k], OmegaLimitClass::ConvergedToPositiveFixedPoint) << k;
}

TEST(BasinRaster, BoundaryTupleAllOrigin) {
  const auto b = default_budget(boundary());
  const auto r = basin_raster(boundary(), 8, b.max_iter, b.tol);
  for (auto c : r.cells) ASSERT_EQ(c, OmegaLimitClass::ConvergedToOrigin);
}

TEST(BasinRaster, SingleCellIsTheOrigin) {
  const auto r = basin_raster(p0(), 1, 10, 1e-10);
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_EQ(r.at(0, 0), OmegaLimitClass::ConvergedToOrigin);
}

TEST(BasinRaster, DeterministicAcrossThreadCounts) {
  ::setenv("MOSQDYN_THREADS", "1", 1);
  const auto one = basin_raster(p0(), 16, 30, 1e-10);
  ::setenv("MOSQDYN_THREADS", "5", 1);
  const auto five = basin_raster(p0(), 16, 30, 1e-10);
  ::unsetenv("MOSQDYN_THREADS");
  EXPECT_EQ(one.cells, five.cells);
}

TEST(ClassCode, Mapping) {
  EXPECT_EQ(class_code(OmegaLimitClass::ConvergedToOrigin), 0);
  EXPECT_EQ(class_code(OmegaLimitClass::ConvergedToPositiveFixedPoint), 1);
  EXPECT_EQ(class_code(OmegaLimitClass::EscapeXUnbounded), 2);
  EXPECT_EQ(class_code(OmegaLimitClass::Undetermined), 3);
}

}  // namespace
}  // namespace mosqdyn
