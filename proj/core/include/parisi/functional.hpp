#pragma once

#include <vector>

#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"
#include "parisi/parisi_pde.hpp"

namespace parisi {

struct GammaReport;

/// Continuous piecewise-linear displacement a(u) on [0, 1] given by node
/// values. Admissible when 0 <= u + a(u) <= 1 and the slope is bounded by 1.
class PerturbationField {
 public:
  /// Throws Error{InvalidArgument} for unsorted nodes or inadmissible values.
  static PerturbationField make(std::vector<double> nodes, std::vector<double> values);
  static PerturbationField zero();
  /// Triangle of the given height centered at c with the given half width,
  /// clipped to [0, 1]. Requires |height| <= half_width.
  static PerturbationField hat(double c, double half_width, double height);

  double operator()(double u) const;

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  PerturbationField(std::vector<double> n, std::vector<double> v)
      : nodes_(std::move(n)), values_(std::move(v)) {}
  std::vector<double> nodes_;
  std::vector<double> values_;
};

/// 1/2 int_0^1 u xi''(u) x_mu(u) du, exact (G(u) = u xi'(u) - xi(u) per step).
double parisi_correction(const Mixture& mix, const RSBMeasure& mu);

/// P(mu) = Phi_mu(0, 0) - 1/2 int_0^1 u xi''(u) x_mu(u) du.
double parisi_value(const Mixture& mix, const RSBMeasure& mu, const GridParams& grid);
double parisi_value(const Mixture& mix, const RSBMeasure& mu);

/// P from an existing PDE solution.
double parisi_value(const PDESolution& s);

/// Free energy limit under the usual convention: log 2 + P.
double free_energy(double parisi_value_);

/// Nested tensor Gauss-Hermite evaluation of the recursive definition.
/// Throws Error{LevelCapExceeded} when k > 3.
double recursion_oracle(const Mixture& mix, const RSBMeasure& mu, int quad_order = 48);

/// Push-forward of mu under u -> u + t a(u).
RSBMeasure perturb(const RSBMeasure& mu, const PerturbationField& a, double t);

/// dP(mu_t)/dt at t = 0+, as the finite sum 1/2 sum_q mu({q}) xi''(q)(q - Gamma(q)) a(q).
/// Gamma must be sampled at every atom. Throws Error{MissingGammaSample}.
double directional_derivative(const Mixture& mix, const RSBMeasure& mu, const PerturbationField& a,
                              const GammaReport& gamma);

}  // namespace parisi
