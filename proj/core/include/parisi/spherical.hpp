#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"

namespace parisi {

/// Right end of the working domain [0, q1] for F and f.
inline constexpr double kSphericalQ1 = 1.0 - 1e-6;

/// Returned by cs_value when x_mu reaches 1 only at q = 1.
inline constexpr double kInfiniteValue = std::numeric_limits<double>::infinity();

struct Interval {
  double a = 0.0;
  double b = 0.0;
};

struct SphericalReport {
  std::vector<double> q_grid;
  std::vector<double> x_curve;
  std::vector<double> F_curve;
  std::vector<double> f_curve;
  std::vector<Interval> S_intervals;
  double max_f = 0.0;
  double mass_on_S = 0.0;
  double q_M = 0.0;
  bool verdict = false;
};

/// Crisanti-Sommers value 1/2 (int x xi' + int_0^qhat dq / xhat + log(1 - qhat)),
/// with xhat(q) = int_q^1 x. +infinity when x_mu < 1 on [0, 1).
double cs_value(const Mixture& mix, const GeneralMeasure& mu);

/// F(q) = xi'(q) - int_0^q ds / xhat(s)^2 and f(q) = int_0^q F on q_grid.
/// Throws Error{DegenerateTail} when xhat vanishes on the range.
SphericalReport f_F_curves(const Mixture& mix, const GeneralMeasure& mu, const std::vector<double>& q_grid);

/// S = argmax f (relative tolerance 1e-8) on [0, q1]; verdict is mu(S) >= 1 - tol.
SphericalReport spherical_certify(const Mixture& mix, const GeneralMeasure& mu, double tol = 1e-3);

/// Closed-form FRSB distribution function xi'''(u) / (2 xi''(u)^{3/2}).
/// Throws Error{SingularMixture} when xi''(u) = 0 and Error{RangeViolation}
/// when the value leaves [0, 1].
double frsb_density(const Mixture& mix, double u);

/// d/du of frsb_density.
double frsb_density_derivative(const Mixture& mix, double u);

struct TwoPlusPSolution {
  Mixture mixture;
  GeneralMeasure measure;
  double q_M = 0.0;
  bool applicable = false;
};

/// xi(u) = beta_sq ((1 - t) u^2 + t u^p). Builds the FRSB measure with the
/// closed-form distribution function on [0, q_M) and an atom at q_M, where
/// (1 - q_M)^2 xi''(q_M) = 1. applicable reports both sufficient conditions.
TwoPlusPSolution solve_two_plus_p(double beta_sq, double t, int p, int density_nodes = 4001);

struct StructureReport {
  bool origin_in_support = false;
  double xi2_at_origin = 0.0;
  /// Distance from 0 to the next support point; nullopt when 0 is an
  /// accumulation point of the support or not in it.
  std::optional<double> gap_above_origin;
  bool origin_accumulates = false;
  /// Atoms sitting strictly inside a region of positive density.
  std::vector<Atom> interior_atoms;
  double max_interior_atom_mass = 0.0;
};

StructureReport spherical_structure_checks(const Mixture& mix, const GeneralMeasure& mu);

}  // namespace parisi
