#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "conecd/coeffs.hpp"
#include "oracles.hpp"

using namespace conecd;
constexpr double pi = std::numbers::pi;

TEST(SFun, LimitsAndClosedForms) {
  EXPECT_EQ(s_fun(0.0, 2.0), 1.0);
  EXPECT_EQ(s_fun(3.0, 0.0), 1.0);
  EXPECT_NEAR(s_fun(1.0, pi / 2), 2.0 / pi, 1e-15);
  EXPECT_NEAR(s_fun(-1.0, 1.0), std::sinh(1.0), 1e-15);
  EXPECT_THROW(s_fun(1.0, -0.1), DomainError);
}

TEST(Sigma, TrivialValues) {
  EXPECT_EQ(sigma({0.0, 3.0, 0.3, 1.7}).value(), 0.3);
  EXPECT_EQ(sigma({2.0, 3.0, 0.3, 0.0}).value(), 0.3);
  EXPECT_NEAR(sigma({2.0, 3.0, 1.0, 1.1}).value(), 1.0, 1e-15);
  EXPECT_EQ(sigma({2.0, 3.0, 0.0, 1.1}).value(), 0.0);
}

TEST(Sigma, SphericalClosedForm) {
  // K = N: sigma = sin(t theta) / sin(theta).
  for (double theta : {0.3, 1.0, 2.5, 3.1})
    for (double t : {0.1, 0.5, 0.9})
      EXPECT_NEAR(sigma({2.0, 2.0, t, theta}).value(), std::sin(t * theta) / std::sin(theta), 1e-13);
}

TEST(Sigma, HyperbolicClosedForm) {
  for (double theta : {0.3, 1.0, 4.0})
    EXPECT_NEAR(sigma({-1.0, 1.0, 0.25, theta}).value(), std::sinh(0.25 * theta) / std::sinh(theta), 1e-13);
}

TEST(Sigma, InfiniteBranchBoundary) {
  // The double nearest pi lies below pi, so it is still on the finite branch.
  const double above = std::nextafter(pi, 4.0);
  EXPECT_TRUE(sigma({1.0, 1.0, 0.5, above}).is_infinite());
  EXPECT_TRUE(sigma({1.0, 1.0, 0.5, 3.2}).is_infinite());
  EXPECT_FALSE(sigma({1.0, 1.0, 0.5, pi}).is_infinite());
  EXPECT_TRUE(sigma({2.0, 2.0, 0.5, above}).is_infinite());
  EXPECT_FALSE(sigma({-5.0, 1.0, 0.5, 100.0}).is_infinite());
  EXPECT_THROW((void)sigma({1.0, 1.0, 0.5, above}).value(), DomainError);
}

TEST(Sigma, DimensionZeroLimit) {
  EXPECT_EQ(sigma({-1.0, 0.0, 0.5, 1.0}).value(), 0.0);
  EXPECT_EQ(sigma({-1.0, 0.0, 1.0, 1.0}).value(), 1.0);
}

TEST(Sigma, RejectsBadArguments) {
  EXPECT_THROW(sigma({1.0, 1.0, 1.5, 0.2}), DomainError);
  EXPECT_THROW(sigma({1.0, 1.0, 0.5, -0.2}), DomainError);
  EXPECT_THROW(sigma({1.0, -1.0, 0.5, 0.2}), DomainError);
}

TEST(Tau, FlatAndOneDimensional) {
  EXPECT_EQ(tau({0.0, 3.0, 0.4, 2.0}).value(), 0.4);
  // Exponent 1 - 1/N vanishes at N = 1; the inner coefficient does not matter.
  EXPECT_EQ(tau({5.0, 1.0, 0.4, 10.0}).value(), 0.4);
  EXPECT_THROW(tau({1.0, 0.5, 0.4, 1.0}), DomainError);
}

TEST(Tau, InfiniteWhenInnerSigmaIs) {
  // tau_{K,N} uses sigma_{K,N-1}: infinite iff K theta^2 >= (N-1) pi^2.
  EXPECT_TRUE(tau({2.0, 2.0, 0.5, 2.23}).is_infinite());  // 2 * 2.23^2 > pi^2
  EXPECT_FALSE(tau({2.0, 2.0, 0.5, 2.2}).is_infinite());
  EXPECT_TRUE(tau({1.0, 2.0, 0.5, std::nextafter(pi, 4.0)}).is_infinite());
  EXPECT_FALSE(tau({1.0, 2.0, 0.5, pi}).is_infinite());
}

TEST(Tau, DominatesSigmaForPositiveK) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const double N = 1.0 + 5.0 * U(rng), K = 3.0 * U(rng), t = U(rng);
    const double theta = 0.95 * pi * std::sqrt((N - 1.0) / std::max(K, 1e-9)) * U(rng);
    const auto s = sigma({K, N, t, theta}), ta = tau({K, N, t, theta});
    if (ta.is_infinite()) continue;
    EXPECT_LE(s.value(), ta.value() * (1.0 + 1e-12) + 1e-15);
  }
}

TEST(Coefficients, MatchFiftyDigitOracle) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int checked = 0;
  while (checked < 400) {
    const double K = -5.0 + 10.0 * U(rng), N = 1.0 + 9.0 * U(rng), t = U(rng), theta = 3.0 * U(rng);
    if (K * theta * theta > 0.9 * (N - 1.0) * pi * pi) continue;
    const auto s = oracle::sigma(K, N, t, theta);
    const auto ta = oracle::tau(K, N, t, theta);
    ASSERT_TRUE(s && ta);
    EXPECT_NEAR(sigma({K, N, t, theta}).value(), s->convert_to<double>(), 1e-12);
    EXPECT_NEAR(tau({K, N, t, theta}).value(), ta->convert_to<double>(), 1e-12);
    EXPECT_NEAR(s_fun(K / N, theta), oracle::s_fun(oracle::mp(K) / N, theta).convert_to<double>(), 1e-12);
    ++checked;
  }
}

TEST(ExtendedReal, Arithmetic) {
  const auto inf = ExtendedReal::infinity();
  EXPECT_TRUE((inf * ExtendedReal(0.0)).is_infinite());
  EXPECT_EQ(pow(inf, 0.0).value(), 1.0);
  EXPECT_TRUE(pow(inf, 0.5).is_infinite());
  EXPECT_EQ(pow(ExtendedReal(4.0), 0.5).value(), 2.0);
  EXPECT_EQ(inf.to_double(), HUGE_VAL);
  EXPECT_EQ(ExtendedReal(2.0), ExtendedReal(2.0));
  EXPECT_FALSE(inf == ExtendedReal(2.0));
}

TEST(Sigma, BoundaryNeighbours) {
  for (double K : {0.3, 1.0, 2.0, 4.7}) {
    for (double N : {1.5, 2.0, 3.0, 7.25}) {
      const double edge = pi * std::sqrt(N / K);
      for (double theta : {std::nextafter(edge, 0.0), edge, std::nextafter(edge, 100.0)}) {
        const bool expect = !oracle::sigma(K, N, 0.5, theta).has_value();
        EXPECT_EQ(sigma_is_infinite(K, N, theta), expect) << K << ' ' << N << ' ' << theta;
      }
    }
  }
}
