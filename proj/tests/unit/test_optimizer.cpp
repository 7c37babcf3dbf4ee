#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "parisi/error.hpp"
#include "parisi/functional.hpp"
#include "parisi/gamma.hpp"
#include "parisi/optimizer.hpp"

using namespace parisi;

namespace {

const Mixture kRS = Mixture::pure(2, 0.36);
const Mixture kSK = Mixture::pure(2, 0.64);

// k = 0 optimum for beta_2 = 0.8 and the best k = 1 value, both from an
// independent nested Gauss-Hermite minimization.
constexpr double kRsValue = 0.3196389176468415;
constexpr double kOneStepValue = 0.3196379568504084;

const AdaptiveResult& adaptive_sk() {
  static const AdaptiveResult r = minimize_adaptive(kSK);
  return r;
}

const AdaptiveResult& adaptive_rs() {
  static const AdaptiveResult r = minimize_adaptive(kRS);
  return r;
}

PerturbationField random_hat(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (;;) {
    const double c = U(rng);
    const double w = 0.02 + 0.18 * U(rng);
    const double h = (2 * U(rng) - 1) * w;
    try {
      return PerturbationField::hat(c, w, h);
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST(Optimizer, ReplicaSymmetricFixedK) {
  const auto r0 = minimize_fixed_k(kRS, 0);
  ASSERT_EQ(r0.measure.support().size(), 1u);
  EXPECT_LE(r0.measure.support()[0].q, 1e-3);
  EXPECT_NEAR(r0.value, 0.18, 1e-6);

  const auto r1 = minimize_fixed_k(kRS, 1);
  EXPECT_LE(metric_d(clean_measure(r1.measure), RSBMeasure::dirac(0.0)), 1e-3);
  EXPECT_LE(r1.value, 0.18 + 1e-9);
}

TEST(Optimizer, OneStepGoldenValue) {
  const auto r0 = minimize_fixed_k(kSK, 0);
  const auto r1 = minimize_fixed_k(kSK, 1, {}, {r0.measure});
  EXPECT_NEAR(r0.value, kRsValue, 1e-7);
  EXPECT_NEAR(r1.value, kOneStepValue, 1e-7);
  EXPECT_GT(r0.value - r1.value, 0.0);
}

TEST(Optimizer, OneStepGapExceedsMicro) {
  const auto r0 = minimize_fixed_k(kSK, 0);
  const auto r1 = minimize_fixed_k(kSK, 1, {}, {r0.measure});
  EXPECT_GT(r0.value - r1.value, 1e-6);
}

TEST(Optimizer, AdaptiveReplicaSymmetric) {
  const auto& r = adaptive_rs();
  EXPECT_LE(metric_d(r.measure, RSBMeasure::dirac(0.0)), 1e-3);
  EXPECT_NEAR(r.value, 0.18, 1e-6);
  EXPECT_EQ(certify(kRS, r.measure).verdict, Verdict::ConsistentMinimizer);
}

TEST(Optimizer, AdaptiveBelowTransition) {
  const auto& r = adaptive_sk();
  const auto c = certify(kSK, r.measure);
  ASSERT_GE(c.support_estimate.size(), 2u);
  for (std::size_t i = 0; i < c.support_estimate.size(); ++i) {
    EXPECT_LE(std::abs(c.gamma_at_support[i] - c.support_estimate[i].q), 1e-3) << c.support_estimate[i].q;
  }
}

TEST(Optimizer, TraceNonincreasingAndBelowDirac) {
  for (const auto* r : {&adaptive_rs(), &adaptive_sk()}) {
    ASSERT_FALSE(r->trace.empty());
    EXPECT_EQ(r->trace.front().k, 0);
    for (std::size_t i = 1; i < r->trace.size(); ++i) {
      EXPECT_LE(r->trace[i].value, r->trace[i - 1].value);
      EXPECT_EQ(r->trace[i].k, r->trace[i - 1].k + 1);
    }
    double best = r->trace.front().value;
    for (const auto& t : r->trace) best = std::min(best, t.value);
    // the last level is kept only when it gains more than improve_tol
    EXPECT_LE(r->value, r->trace.front().value);
    EXPECT_LE(r->value - best, OptimizerOptions{}.improve_tol);
  }
  EXPECT_LE(adaptive_rs().value, 0.5 * kRS.eval(1.0));
  EXPECT_LE(adaptive_sk().value, 0.5 * kSK.eval(1.0));
}

TEST(Optimizer, StartSeedRobustness) {
  OptimizerOptions a, b;
  a.seed = 1;
  b.seed = 99;
  EXPECT_NEAR(minimize_fixed_k(kSK, 0, a).value, minimize_fixed_k(kSK, 0, b).value, 1e-6);
}

TEST(Optimizer, CertifyExamples) {
  const auto rs = certify(kRS, RSBMeasure::dirac(0.0));
  EXPECT_EQ(rs.verdict, Verdict::ConsistentMinimizer);
  EXPECT_NEAR(rs.gamma_at_support[0], 0.0, 1e-12);
  EXPECT_NEAR(rs.gamma_prime_max, 0.72, 1e-6);
  EXPECT_TRUE(rs.origin_in_support);
  EXPECT_DOUBLE_EQ(rs.origin_mass, 1.0);
  EXPECT_LT(rs.moment_bound_rhs, 0.0);

  const auto sk = certify(kSK, RSBMeasure::dirac(0.0));
  EXPECT_EQ(sk.verdict, Verdict::ViolatesGammaSlope);
  EXPECT_NEAR(sk.gamma_prime_max, 1.28, 1e-6);

  std::mt19937_64 rng(5);
  for (int t = 0; t < 3; ++t) {
    const auto mix = oracle::random_mixture(rng);
    const auto c = certify(mix, RSBMeasure::dirac(0.3));
    EXPECT_EQ(c.verdict, Verdict::ViolatesOrigin);
    EXPECT_FALSE(c.origin_in_support);
  }
}

TEST(Optimizer, CertificateInvariants) {
  const auto mu = RSBMeasure::make(1, {0, 0.4, 1}, {0, 0, 0.5, 1});
  const auto c = certify(kSK, mu);
  EXPECT_GE(c.gamma_residual, 0.0);
  EXPECT_EQ(c.support_estimate.size(), c.gamma_at_support.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < c.support_estimate.size(); ++i) {
    worst = std::max(worst, std::abs(c.gamma_at_support[i] - c.support_estimate[i].q));
  }
  EXPECT_DOUBLE_EQ(c.gamma_residual, worst);
  EXPECT_EQ(c.verdict, Verdict::ViolatesGammaFixedPoint);
}

TEST(Optimizer, CleanMeasure) {
  const auto mu = RSBMeasure::from_atoms({{0.00005, 0.3}, {0.5, 0.3}, {0.50005, 0.4}});
  const auto c = clean_measure(mu);
  ASSERT_EQ(c.support().size(), 2u);
  EXPECT_EQ(c.support()[0].q, 0.0);
  EXPECT_NEAR(c.support()[0].mass, 0.3, 1e-15);
  EXPECT_NEAR(c.support()[1].mass, 0.7, 1e-15);

  const auto light = clean_measure(RSBMeasure::from_atoms({{0.0, 1.0 - 1e-8}, {0.6, 1e-8}}));
  EXPECT_EQ(light.support().size(), 1u);
}

TEST(Optimizer, FirstOrderOptimality) {
  std::mt19937_64 rng(11);
  for (const auto* r : {&adaptive_rs(), &adaptive_sk()}) {
    std::vector<double> qs;
    for (const auto& a : r->measure.support()) qs.push_back(a.q);
    const auto mix = r == &adaptive_rs() ? kRS : kSK;
    const auto rep = gamma_report(mix, r->measure, qs);
    for (int i = 0; i < 50; ++i) {
      EXPECT_GE(directional_derivative(mix, r->measure, random_hat(rng), rep), -1e-3);
    }
  }
}
