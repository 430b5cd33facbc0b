#include <gtest/gtest.h>

#include "support.hpp"

namespace mosqdyn {
namespace {

using testing::p0;

TEST(ValidateParams, SetsReducedRegimeFlag) {
  // 0 < 0.8 <= 1, d0 = 0.3 > 0, alpha + d0 = 0.8 <= 1, d1 = 0
  EXPECT_TRUE(validate_params(0.5, 2.0, 0.8, 0.3, 0.0).w0_regime());
  EXPECT_FALSE(validate_params(0.5, 2.0, 0.8, 0.3, 0.1).w0_regime());
  EXPECT_FALSE(validate_params(0.5, 2.0, 1.5, 0.3, 0.0).w0_regime());
  EXPECT_FALSE(validate_params(0.5, 2.0, 0.8, 0.0, 0.0).w0_regime());
  EXPECT_FALSE(validate_params(0.7, 2.0, 0.8, 0.31, 0.0).w0_regime());
  EXPECT_TRUE(validate_params(0.7, 2.0, 1.0, 0.3, 0.0).w0_regime());
}

TEST(ValidateParams, RejectsGeneralRegimeViolations) {
  auto code_of = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return std::pair{e.code(), e.field()};
    }
    return std::pair{Errc::DomainError, std::string("none")};
  };
  EXPECT_EQ(code_of([] { validate_params(NAN, 1, 1, 0, 0); }), std::pair(Errc::NonFinite, std::string("alpha")));
  EXPECT_EQ(code_of([] { validate_params(1, INFINITY, 1, 0, 0); }), std::pair(Errc::NonFinite, std::string("beta")));
  EXPECT_EQ(code_of([] { validate_params(-1, 1, 1, 0, 0); }), std::pair(Errc::NonPositiveRate, std::string("alpha")));
  EXPECT_EQ(code_of([] { validate_params(1, 0, 1, 0, 0); }), std::pair(Errc::NonPositiveRate, std::string("beta")));
  EXPECT_EQ(code_of([] { validate_params(1, 1, 0, 0, 0); }), std::pair(Errc::NonPositiveRate, std::string("mu")));
  EXPECT_EQ(code_of([] { validate_params(1, 1, 1, -0.1, 0); }), std::pair(Errc::NegativeDeath, std::string("d0")));
  EXPECT_EQ(code_of([] { validate_params(1, 1, 1, 0, -1e-9); }), std::pair(Errc::NegativeDeath, std::string("d1")));
}

TEST(State, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(State(-1e-3, 0.0), Error);
  EXPECT_THROW(State(0.0, NAN), Error);
  EXPECT_NO_THROW(State(0.0, 0.0));
}

TEST(State, ClampsRoundingNegatives) {
  EXPECT_EQ(State::clamped({-1e-13, 2.0}), State(0.0, 2.0));
  EXPECT_EQ(State::clamped({1.0, -1e-12}), State(1.0, 0.0));
  EXPECT_THROW(State::clamped({-1e-11, 0.0}), Error);
}

TEST(EmergenceResponse, Values) {
  EXPECT_EQ(emergence_response(0.0), 0.0);
  EXPECT_EQ(emergence_response(1.0), 0.5);
  EXPECT_NEAR(emergence_response(1e6), 0.999999, 1e-9);
  EXPECT_LT(emergence_response(1e15), 1.0);
  EXPECT_THROW(emergence_response(-0.5), Error);
}

TEST(EmergenceResponse, StrictlyIncreasingOnSampledPairs) {
  const CounterRng rng(11);
  for (std::uint64_t k = 0; k < 10000; ++k) {
    double a = rng.uniform(k, 0, 0.0, 100.0), b = rng.uniform(k, 1, 0.0, 100.0);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    ASSERT_LT(emergence_response(a), emergence_response(b)) << a << " " << b;
  }
}

TEST(StepGeneral, HandEvaluatedValues) {
  EXPECT_EQ(step_general(p0(), State(0, 0)), (Vec2{0, 0}));
  // x' = 2*0.5 - 0.25 - 0.3 + 1, y' = 0.25 - 0.4 + 0.5
  const Vec2 a = step_general(p0(), State(1.0, 0.5));
  EXPECT_NEAR(a.x, 1.45, 1e-15);
  EXPECT_NEAR(a.y, 0.35, 1e-15);
  // d1 x^2 = 0.1 more larvae death
  const Vec2 b = step_general(validate_params(0.5, 2.0, 0.8, 0.3, 0.1), State(1.0, 0.5));
  EXPECT_NEAR(b.x, 1.35, 1e-15);
  EXPECT_NEAR(b.y, 0.35, 1e-15);
}

TEST(StepW0, HandEvaluatedValues) {
  EXPECT_EQ(step_w0(p0(), State(0, 0)), State(0, 0));
  const State fp = step_w0(p0(), State(1.5, 0.375));
  EXPECT_NEAR(fp.x(), 1.5, 1e-15);
  EXPECT_NEAR(fp.y(), 0.375, 1e-15);
  const State s = step_w0(p0(), State(1.0, 0.5));
  EXPECT_NEAR(s.x(), 1.45, 1e-15);
  EXPECT_NEAR(s.y(), 0.35, 1e-15);
}

TEST(StepW0, RequiresReducedRegime) {
  try {
    step_w0(validate_params(0.5, 2.0, 0.8, 0.3, 0.1), State(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RegimeError);
  }
}

TEST(StepW0, ImagesStayNonnegative) {
  const CounterRng rng(2024);
  for (std::uint64_t k = 0; k < 100000; ++k) {
    const Params p = testing::random_params(rng, k, testing::BetaRange::Anywhere);
    const State z = testing::random_state(rng, k, 1e3, 1e3);
    const Vec2 raw = w0_map(p, z.vec());
    ASSERT_GE(raw.x, -kClampTolerance);
    ASSERT_GE(raw.y, -kClampTolerance);
    ASSERT_NO_THROW(step_w0(p, z));
  }
}

// The two forms group the same terms differently, so where x' cancels the
// results can differ by many ulps of x' itself. Ulps are counted at the
// magnitude of the largest summand instead.
TEST(StepW0, AgreesWithGeneralOperatorAtZeroD1) {
  const CounterRng rng(77);
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 100000; ++k) {
    const Params p = testing::random_params(rng, k, testing::BetaRange::Anywhere);
    const State z = testing::random_state(rng, k, 50.0, 50.0);
    const Vec2 g = step_general(p, z);
    const State w = step_w0(p, z);
    const double x = z.x(), y = z.y();
    const double emerge = p.alpha() * x / (1.0 + x);
    const double sx = std::max({p.beta() * y, emerge, p.d0() * x, x});
    const double sy = std::max({emerge, p.mu() * y, y});
    const double ux = std::nextafter(sx, INFINITY) - sx, uy = std::nextafter(sy, INFINITY) - sy;
    if (sx > 0) worst = std::max(worst, std::abs(g.x - w.x()) / ux);
    if (sy > 0) worst = std::max(worst, std::abs(g.y - w.y()) / uy);
  }
  EXPECT_LE(worst, 4.0);
}

}  // namespace
}  // namespace mosqdyn
