#pragma once

#include <optional>
#include <string>
#include <vector>

#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"

namespace parisi {

/// Root of xi''(q) = 1 when xi''(0) < 1 (1 when xi'' < 1 on all of [0, 1]);
/// nullopt when xi''(0) >= 1.
std::optional<double> check_thm1_gap(const Mixture& mix);

struct CriteriaReport {
  std::optional<double> q_hat_gap;
  bool thm3_satisfied = false;
  /// xi(1) - max(8 log 2, sqrt(xi'(1)) 2^{xi'(1)/xi(1) + 5} / 3).
  double thm3_margin = 0.0;
  bool thm4_satisfied = false;
  /// Smallest slack among beta_2 - 1/sqrt(2), 3/(2 sqrt(2)) - beta_2 and
  /// 1 - (xi'''(1)/6 + 2/3 sqrt(xi''(1))).
  double thm4_margin = 0.0;
  double thm4_lhs = 0.0;
  double beta2 = 0.0;
  std::vector<std::string> notes;
};

CriteriaReport check_rsb_criteria(const Mixture& mix);

/// Margins evaluated in 128-bit binary floating point.
double thm3_margin_quad(const Mixture& mix);
double thm4_lhs_quad(const Mixture& mix);

struct MomentBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

/// int xi(q)/xi(1) dmu >= 1 - sqrt(2 log 2 / xi(1)), within 1e-9.
MomentBound moment_bound_check(const Mixture& mix, const RSBMeasure& mu);
MomentBound moment_bound_check(const Mixture& mix, const GeneralMeasure& mu);

struct GaussianIdentityRow {
  double a = 0.0;
  double quadrature = 0.0;   ///< E e^{a|g|} by adaptive quadrature
  double closed_form = 0.0;  ///< 2 e^{a^2/2} Phi_N(a)
  double residual = 0.0;
};

struct MillsRow {
  double a = 0.0;
  double value = 0.0;  ///< e^{a^2/2} int_{|a|}^inf e^{-s^2/2} ds
  double lower = 0.0;  ///< 3/(4|a|)
  double upper = 0.0;  ///< 1/|a|
  bool holds = false;
};

struct GaussianSelfTest {
  std::vector<GaussianIdentityRow> identity;
  std::vector<MillsRow> mills;
  double max_identity_residual = 0.0;
  bool mills_hold = false;
};

GaussianSelfTest gaussian_selftest(const std::vector<double>& identity_points = {-3.0, -1.0, 0.0, 1.0, 3.0},
                                   const std::vector<double>& mills_points = {-2.0, -3.0, -5.0});

struct ConsistencyPoint {
  double u = 0.0;
  double x_mu = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

/// Compares x_mu(u) with (zeta F1 + F2) / F3 on [a, b], where
/// zeta = xi'''/xi''^2, F1 = E (Phi'')^2 e^W, F2 = E (Phi''')^2 e^W and
/// F3 = 2 E (Phi'')^3 e^W. Diagnostic only.
std::vector<ConsistencyPoint> density_consistency(const Mixture& mix, const RSBMeasure& mu, double a, double b,
                                                  int n_points = 21);

}  // namespace parisi
