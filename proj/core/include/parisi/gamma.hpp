#pragma once

#include <cstdint>
#include <vector>

#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"
#include "parisi/parisi_pde.hpp"

namespace parisi {

/// Law of the tilted process X(u) (M under the exp W change of measure).
///
/// The law at each level start is kept as masses on the x grid; inside a
/// level the law is the Gaussian kernel from the level start reweighted by
/// exp(m (Phi(x, u) - Phi(y, start))).
struct TiltedDensity {
  std::vector<double> x_grid;
  std::vector<double> u_slices;
  /// rho[i][j]: density at (x_grid[j], u_slices[i]), renormalized to unit mass.
  std::vector<std::vector<double>> rho;
  /// Mass of each slice before renormalization (E exp W).
  std::vector<double> raw_mass;
  /// Masses at grid nodes at each level start of the PDE level structure.
  std::vector<std::vector<double>> level_mass;
  /// Pre-renormalization mass when advancing to each level start.
  std::vector<double> level_raw_mass;

  double max_mass_drift() const;
};

struct GammaReport {
  std::vector<double> u_samples;
  std::vector<double> gamma;
  std::vector<double> gamma_prime;
  std::vector<double> gamma_pp_right;
  std::vector<double> gamma_pp_left;
  std::vector<double> gamma1;
  std::vector<double> gamma2;
  /// E exp W before renormalization at each sample.
  std::vector<double> mass;
};

/// Tilted forward law on the PDE grid. With materialize = false only the
/// level-start masses are built (enough for Gamma queries).
/// Throws Error{MassLeak} when a pre-renormalization mass is off by > 1e-4.
TiltedDensity tilted_density(const Mixture& mix, const PDESolution& s, bool materialize = true);

/// Gamma(u) = E (d_x Phi)^2 exp W.
GammaReport gamma_curve(const TiltedDensity& td, const PDESolution& s, const std::vector<double>& u_samples);

/// Gamma, Gamma', gamma_1, gamma_2 and the one-sided second derivatives.
GammaReport gamma_derivatives(const TiltedDensity& td, const PDESolution& s,
                              const std::vector<double>& u_samples);

struct GammaMonteCarlo {
  double estimate = 0.0;
  double standard_error = 0.0;
  double exp_w_mean = 0.0;
  double exp_w_standard_error = 0.0;
};

/// Path sampling of (d_x Phi(M(u), u))^2 exp W(u) on the xi'-clock.
GammaMonteCarlo mc_gamma_oracle(const PDESolution& s, double u, std::size_t n_paths, std::uint64_t seed);
GammaMonteCarlo mc_gamma_oracle(const Mixture& mix, const RSBMeasure& mu, double u, std::size_t n_paths,
                                std::uint64_t seed);

/// Solves the PDE on a grid suited to Gamma queries and returns the full report
/// at u_samples.
GammaReport gamma_report(const Mixture& mix, const RSBMeasure& mu, const std::vector<double>& u_samples);

}  // namespace parisi
