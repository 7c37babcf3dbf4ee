#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "parisi/error.hpp"
#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"
#include "parisi/spherical.hpp"

using namespace parisi;

TEST(Measure, BuildsTriplets) {
  const auto d0 = RSBMeasure::make(0, {0, 1}, {0, 0, 1});
  ASSERT_EQ(d0.support().size(), 1u);
  EXPECT_EQ(d0.support()[0].q, 0.0);
  EXPECT_EQ(d0.support()[0].mass, 1.0);

  const auto one = RSBMeasure::make(1, {0, 0.3, 1}, {0, 0, 0.6, 1});
  const auto s = one.support();
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[0].mass, 0.3);
  EXPECT_DOUBLE_EQ(s[1].q, 0.6);
  EXPECT_DOUBLE_EQ(s[1].mass, 0.7);
}

TEST(Measure, RejectsBadTriplets) {
  try {
    RSBMeasure::make(1, {0, 0.7, 0.3}, {0, 0, 0.6, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OrderingViolation);
  }
  EXPECT_THROW(RSBMeasure::make(1, {0, 0.3, 1}, {0, 0.7, 0.6, 1}), Error);
  EXPECT_THROW(RSBMeasure::make(1, {0, 0.3, 1}, {0, 0.2, 1.2, 1}), Error);
  EXPECT_THROW(RSBMeasure::make(1, {0, 0.3}, {0, 0.2, 1}), Error);
}

TEST(Measure, CdfIsRightContinuousStep) {
  const auto d0 = RSBMeasure::dirac(0.0);
  EXPECT_EQ(d0.cdf(0.5), 1.0);
  const auto one = RSBMeasure::make(1, {0, 0.3, 1}, {0, 0, 0.6, 1});
  EXPECT_DOUBLE_EQ(one.cdf(0.6), 1.0);
  EXPECT_DOUBLE_EQ(one.cdf(0.59), 0.3);
  EXPECT_DOUBLE_EQ(one.cdf_left(0.6), 0.3);
  EXPECT_THROW(one.cdf(1.2), Error);
}

TEST(Measure, CdfRoundTripsTriplet) {
  std::mt19937_64 rng(3);
  for (int k = 0; k <= 4; ++k) {
    const auto mu = oracle::random_measure(rng, k);
    for (int p = 1; p <= k + 1; ++p) EXPECT_EQ(mu.cdf(mu.q()[p]), mu.m()[p]);
  }
}

TEST(Measure, MergesNearbyAtoms) {
  const auto mu = RSBMeasure::from_atoms({{0.3, 0.25}, {0.3 + 1e-13, 0.25}, {0.1, 0.5}});
  ASSERT_EQ(mu.support().size(), 2u);
  EXPECT_DOUBLE_EQ(mu.support()[1].mass, 0.5);
}

TEST(Measure, MetricExamples) {
  const auto d0 = RSBMeasure::dirac(0.0);
  EXPECT_EQ(metric_d(d0, d0), 0.0);
  EXPECT_DOUBLE_EQ(metric_d(d0, RSBMeasure::dirac(1.0)), 1.0);
  EXPECT_DOUBLE_EQ(metric_d(d0, RSBMeasure::from_atoms({{0.0, 0.5}, {0.5, 0.5}})), 0.25);
}

TEST(Measure, MetricAxioms) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const auto a = oracle::random_measure(rng, t % 3);
    const auto b = oracle::random_measure(rng, (t + 1) % 4);
    const auto c = oracle::random_measure(rng, (t + 2) % 3);
    EXPECT_NEAR(metric_d(a, b), metric_d(b, a), 1e-15);
    EXPECT_EQ(metric_d(a, a), 0.0);
    EXPECT_LE(metric_d(a, c), metric_d(a, b) + metric_d(b, c) + 1e-14);
  }
}

TEST(Measure, MetricMatchesBruteForce) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    const auto a = oracle::random_measure(rng, 2);
    const auto b = oracle::random_measure(rng, 1);
    double brute = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = (i + 0.5) / n;
      brute += std::abs(a.cdf(u) - b.cdf(u)) / n;
    }
    EXPECT_NEAR(metric_d(a, b), brute, 1e-4);
  }
}

TEST(Measure, GeneralMeasureValidation) {
  EXPECT_THROW(GeneralMeasure::make({{0.2, 0.5}}, {}), Error);
  EXPECT_THROW(GeneralMeasure::make({{0.0, 0.5}}, {{0.0, 1.0, {1.0, -0.2}}}), Error);
  const auto g = GeneralMeasure::make({{0.0, 0.5}}, {{0.0, 1.0, {0.5, 0.5}}});
  EXPECT_NEAR(g.cdf(0.5), 0.75, 1e-15);
  EXPECT_NEAR(g.cdf_left(0.0), 0.0, 1e-15);
}

TEST(Measure, DiscretizeDiracIsExact) {
  const auto g = GeneralMeasure::from_rsb(RSBMeasure::dirac(0.0));
  const auto r = discretize(g, 1);
  EXPECT_EQ(metric_d(g, r), 0.0);
}

TEST(Measure, DiscretizeUniform) {
  const auto g = GeneralMeasure::make({}, {{0.0, 1.0, {1.0, 1.0}}});
  for (int n : {1, 2, 5, 16, 64}) {
    const auto r = discretize(g, n);
    EXPECT_EQ(static_cast<int>(r.support().size()), n);
    for (const auto& a : r.support()) EXPECT_NEAR(a.mass, 1.0 / n, 1e-12);
    EXPECT_LE(metric_d(g, r), 1.0 / (2 * n) + 1e-12);
    // equal slices at conditional means: exactly 1/(4n)
    EXPECT_NEAR(metric_d(g, r), 1.0 / (4 * n), 1e-12);
  }
}

TEST(Measure, DiscretizeMonotoneAndCapacity) {
  const auto g = GeneralMeasure::make({{0.0, 0.2}, {0.9, 0.3}}, {{0.1, 0.6, {0.0, 1.0, 2.0, 1.0, 0.0}}});
  double prev = 1e9;
  for (int n = 3; n <= 96; n *= 2) {
    const double d = metric_d(g, discretize(g, n));
    EXPECT_LE(d, prev + 1e-15);
    prev = d;
  }
  try {
    discretize(g, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CapacityError);
  }
}

TEST(Measure, DiscretizeFrsbMeasure) {
  const auto sol = solve_two_plus_p(1.0, 0.05, 4);
  EXPECT_LE(metric_d(sol.measure, discretize(sol.measure, 64)), 1e-2);
}

TEST(Measure, FrsbCdfMatchesClosedForm) {
  const auto sol = solve_two_plus_p(1.0, 0.05, 4);
  for (double u : {0.02, 0.1, 0.2, 0.27}) {
    const double closed = frsb_density(sol.mixture, u);
    EXPECT_NEAR(sol.measure.cdf(u), closed, 1e-6) << u;
  }
}
