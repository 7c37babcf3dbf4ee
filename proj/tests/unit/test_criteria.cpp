#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "parisi/criteria.hpp"

using namespace parisi;

namespace {

double pure3_margin(double beta) { return check_rsb_criteria(Mixture::pure(3, beta * beta)).thm3_margin; }

}  // namespace

TEST(Criteria, GapPoint) {
  EXPECT_NEAR(*check_thm1_gap(Mixture::pure(3, 1.0)), 1.0 / 6.0, 1e-12);
  EXPECT_FALSE(check_thm1_gap(Mixture::pure(2, 0.64)).has_value());
  EXPECT_EQ(*check_thm1_gap(Mixture::pure(2, 0.36)), 1.0);
  const auto mix = Mixture::validate({{2, 0.3}, {4, 0.2}});
  const double q = *check_thm1_gap(mix);
  EXPECT_NEAR(mix.eval(q, 2), 1.0, 1e-10);
}

TEST(Criteria, ThmThreePureThree) {
  EXPECT_TRUE(check_rsb_criteria(Mixture::pure(3, 148.0 * 148.0)).thm3_satisfied);
  EXPECT_FALSE(check_rsb_criteria(Mixture::pure(3, 147.0 * 147.0)).thm3_satisfied);
  double lo = 147.0, hi = 148.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (pure3_margin(mid) > 0 ? hi : lo) = mid;
  }
  EXPECT_NEAR(lo, 147.80, 0.01);
  EXPECT_NEAR(lo, std::pow(2.0, 8) * std::sqrt(3.0) / 3.0, 1e-6);
}

TEST(Criteria, ThmThreeTwoPlusThree) {
  const double xi1 = 3.0 * std::pow(2.0, 16) / 9.0;
  for (double t : {0.1, 0.5, 0.9}) {
    const auto mix = Mixture::validate({{2, xi1 * (1 - t)}, {3, xi1 * t}});
    EXPECT_TRUE(check_rsb_criteria(mix).thm3_satisfied) << t;
  }
}

TEST(Criteria, ThmFourWindow) {
  const auto r = check_rsb_criteria(Mixture::pure(2, 0.64));
  EXPECT_TRUE(r.thm4_satisfied);
  EXPECT_NEAR(r.thm4_lhs, 2.0 / 3.0 * std::sqrt(1.28), 1e-15);
  EXPECT_NEAR(r.thm4_lhs, 0.7543, 1e-4);
  EXPECT_NEAR(r.beta2, 0.8, 1e-15);
  const double lo = 1.0 / std::numbers::sqrt2;
  const double hi = 3.0 / (2.0 * std::numbers::sqrt2);
  auto sat = [](double b) { return check_rsb_criteria(Mixture::pure(2, b * b)).thm4_satisfied; };
  EXPECT_FALSE(sat(lo - 1e-9));
  EXPECT_TRUE(sat(lo + 1e-9));
  EXPECT_TRUE(sat(hi - 1e-9));
  EXPECT_FALSE(sat(hi + 1e-9));
  // the cubic term pushes the left-hand side over 1
  EXPECT_FALSE(check_rsb_criteria(Mixture::validate({{2, 0.64}, {3, 0.3}})).thm4_satisfied);
}

TEST(Criteria, MarginsAreExactSlack) {
  const auto mix = Mixture::validate({{2, 0.9}, {3, 0.2}});
  const auto r = check_rsb_criteria(mix);
  const double xi1 = mix.eval(1.0), xp1 = mix.eval(1.0, 1);
  EXPECT_DOUBLE_EQ(r.thm3_margin,
                   xi1 - std::max(8 * std::log(2.0), std::sqrt(xp1) * std::pow(2.0, xp1 / xi1 + 5) / 3));
  const double lhs = mix.eval(1.0, 3) / 6 + 2.0 / 3.0 * std::sqrt(mix.eval(1.0, 2));
  EXPECT_DOUBLE_EQ(r.thm4_lhs, lhs);
  EXPECT_DOUBLE_EQ(r.thm4_margin, std::min({r.beta2 - 1 / std::numbers::sqrt2,
                                            3 / (2 * std::numbers::sqrt2) - r.beta2, 1 - lhs}));
}

TEST(Criteria, QuadPrecisionAgrees) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto mix = t < 10 ? oracle::random_mixture(rng) : oracle::random_mixture(rng, 300.0);
    const auto r = check_rsb_criteria(mix);
    EXPECT_NEAR(r.thm3_margin, thm3_margin_quad(mix), 1e-12 * (1 + std::abs(r.thm3_margin)));
    EXPECT_NEAR(r.thm4_lhs, thm4_lhs_quad(mix), 1e-12 * (1 + std::abs(r.thm4_lhs)));
  }
}

TEST(Criteria, MomentBound) {
  const auto cool = Mixture::pure(2, 0.36);
  const auto d0 = moment_bound_check(cool, RSBMeasure::dirac(0.0));
  EXPECT_EQ(d0.lhs, 0.0);
  EXPECT_LT(d0.rhs, 0.0);
  EXPECT_TRUE(d0.satisfied);

  const auto cold = Mixture::pure(2, 8 * std::log(2.0));
  const auto v = moment_bound_check(cold, RSBMeasure::dirac(0.0));
  EXPECT_NEAR(v.rhs, 0.5, 1e-15);
  EXPECT_FALSE(v.satisfied);

  const auto mix = Mixture::validate({{2, 0.7}, {4, 0.4}});
  const auto one = moment_bound_check(mix, RSBMeasure::make(1, {0, 0.3, 1}, {0, 0, 0.6, 1}));
  EXPECT_NEAR(one.lhs, 0.7 * mix.eval(0.6) / mix.eval(1.0), 1e-15);

  // uniform density: int xi = 0.7/3 + 0.4/5
  const auto uni = GeneralMeasure::make({}, {{0.0, 1.0, {1.0, 1.0}}});
  EXPECT_NEAR(moment_bound_check(mix, uni).lhs, (0.7 / 3 + 0.4 / 5) / mix.eval(1.0), 1e-13);
}

TEST(Criteria, GaussianSelfTest) {
  const auto t = gaussian_selftest();
  ASSERT_EQ(t.identity.size(), 5u);
  EXPECT_LE(t.max_identity_residual, 1e-10);
  for (const auto& row : t.identity) {
    if (row.a == 1.0) EXPECT_NEAR(row.quadrature, 2.774, 1e-3);
    if (row.a == 0.0) EXPECT_NEAR(row.quadrature, 1.0, 1e-12);
    // independent: sum of the two half-line moment generating functions
    const double half = std::exp(0.5 * row.a * row.a) * 0.5 * std::erfc(-row.a / std::numbers::sqrt2);
    EXPECT_NEAR(row.closed_form, 2 * half, 1e-14);
  }
  EXPECT_TRUE(t.mills_hold);
  ASSERT_EQ(t.mills.size(), 3u);
  EXPECT_NEAR(t.mills[0].value, 0.4214, 1e-4);
  EXPECT_DOUBLE_EQ(t.mills[0].lower, 0.375);
  EXPECT_DOUBLE_EQ(t.mills[0].upper, 0.5);
  for (const auto& row : t.mills) {
    const double c = std::abs(row.a);
    const double want = std::exp(0.5 * c * c) * std::sqrt(std::numbers::pi / 2) * std::erfc(c / std::numbers::sqrt2);
    EXPECT_NEAR(row.value, want, 1e-12);
  }
  // the normalized reading of the bound fails
  EXPECT_NEAR(t.mills[0].value / std::sqrt(2 * std::numbers::pi), 0.168, 1e-3);
  EXPECT_LT(t.mills[0].value / std::sqrt(2 * std::numbers::pi), 0.375);
}

TEST(Criteria, DensityConsistencyDiagnostic) {
  const auto mix = Mixture::pure(2, 0.64);
  const auto mu = RSBMeasure::make(2, {0, 0.3, 0.6, 1}, {0, 0, 0.1, 0.2, 1});
  const auto pts = density_consistency(mix, mu, 0.02, 0.18, 9);
  ASSERT_EQ(pts.size(), 9u);
  for (const auto& p : pts) {
    EXPECT_DOUBLE_EQ(p.x_mu, mu.cdf(p.u));
    EXPECT_TRUE(std::isfinite(p.rhs));
    EXPECT_GT(p.rhs, 0.0);
    EXPECT_DOUBLE_EQ(p.residual, std::abs(p.x_mu - p.rhs));
  }
  const auto singular = density_consistency(Mixture::pure(3, 1.0), RSBMeasure::dirac(0.0), 0.0, 0.0, 1);
  EXPECT_TRUE(std::isnan(singular[0].rhs));
}
