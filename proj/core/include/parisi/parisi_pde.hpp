#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"

namespace parisi {

/// Spatial grid and quadrature controls for the Parisi PDE.
struct GridParams {
  double x_max = 0.0;
  int n_x = 2049;  ///< odd; x = 0 is a node
  int n_u = 513;   ///< uniform u slices; level points q_p are always added
  int quad_order = 40;

  /// x_max = 6 sqrt(xi'(1)) + 8, n_x = 2049, n_u = 513, quad_order = 40.
  static GridParams defaults(const Mixture& mix);

  /// Throws Error{GridTooSmall} when n_x < 256, n_x even, quad_order < 20,
  /// n_u < 0 or x_max < 6 sqrt(xi'(1)) + 8.
  void validate(const Mixture& mix) const;
};

/// Phi and its first three x-derivatives on the spatial grid at one u.
struct Slice {
  double u = 0.0;
  std::vector<double> phi;
  std::vector<double> d1;
  std::vector<double> d2;
  std::vector<double> d3;

  const std::vector<double>& derivative(int j) const;
};

/// Where x_mu changes value. On [breaks[i], breaks[i+1]) the distribution
/// function equals x_values[i]; on [breaks.back(), 1] it equals 1.
struct LevelStructure {
  std::vector<double> breaks;
  std::vector<double> x_values;

  static LevelStructure from(const RSBMeasure& mu);

  std::size_t level_of(double u) const;
  double x_at(double u) const;
};

class PDESolution;

/// Backward Cole-Hopf solve of the Parisi PDE for an atomic measure.
/// Throws Error{GridTooSmall | QuadratureUnderflow}.
PDESolution solve_pde(const Mixture& mix, const RSBMeasure& mu, const GridParams& grid);

/// Phi_mu(0, 0) without materializing u slices or derivatives; this is the
/// hot path of the optimizer.
double phi_at_origin(const Mixture& mix, const RSBMeasure& mu, const GridParams& grid);

class PDESolution {
 public:
  const Mixture& mixture() const noexcept { return mixture_; }
  const RSBMeasure& measure() const noexcept { return measure_; }
  const GridParams& grid() const noexcept { return grid_; }
  const LevelStructure& levels() const noexcept { return levels_; }

  const std::vector<double>& x_grid() const noexcept { return x_; }
  double dx() const noexcept { return dx_; }
  std::size_t center() const noexcept { return x_.size() / 2; }

  const std::vector<double>& u_slices() const noexcept { return u_; }
  const Slice& slice(std::size_t iu) const { return slices_.at(iu); }
  const std::vector<Slice>& slices() const noexcept { return slices_; }

  /// Stored slice at breaks[i] of the level structure.
  const Slice& level_slice(std::size_t i) const { return level_slices_.at(i); }

  /// d^j Phi / dx^j at grid node ix of stored slice iu.
  double value(int j, std::size_t iu, std::size_t ix) const;

  /// Slice at an arbitrary u, recomputed by one Cole-Hopf step from the top
  /// of the level containing u (exact up to quadrature and interpolation).
  Slice exact_slice(double u) const;

  /// Cubic interpolation in x, linear in u between stored slices.
  /// Throws Error{DomainError} for |x| > x_max or u outside [0, 1].
  double eval(double x, double u, int j) const;

  /// Cubic interpolation in x on a given slice, with the asymptotic
  /// |x| + const extension beyond the grid. out = (phi, d1, d2, d3).
  void sample(const Slice& s, double x, double out[4]) const;

 private:
  friend PDESolution solve_pde(const Mixture&, const RSBMeasure&, const GridParams&);
  friend class PDESolutionBuilder;

  PDESolution(Mixture mix, RSBMeasure mu, GridParams grid);
  void build_levels(bool with_derivatives);

  Mixture mixture_;
  RSBMeasure measure_;
  GridParams grid_;
  LevelStructure levels_;
  std::vector<double> x_;
  double dx_ = 0.0;
  std::vector<double> u_;
  std::vector<Slice> slices_;
  std::vector<Slice> level_slices_;
};

double eval_phi(const PDESolution& s, double x, double u, int j);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Path-sampling estimate of d^j Phi / dx^j (j in {1,2,3}) from the
/// expectation representation E F_j(dV, ..., d^{j-1}V, tanh(x + M(1) - M(u))) e^V.
/// Derivatives of V are taken by common-random-number finite differences.
MonteCarloEstimate mc_derivative_oracle(const PDESolution& s, double x, double u, int j,
                                        std::size_t n_paths, std::uint64_t seed);

/// Coefficients of the polynomial F_j(y_1, ..., y_{j-1}, w) as a map from
/// exponent vectors (last entry is the power of w) to coefficients.
std::vector<std::pair<std::vector<int>, double>> derivative_polynomial(int j);

/// Evaluates F_j at (y_1, ..., y_{j-1}, w).
double eval_derivative_polynomial(int j, const std::vector<double>& y, double w);

/// Binary dump: "PARISIPD" magic, uint32 version, grid, mixture, triplet,
/// u slices, then phi, d1, d2, d3 as row-major (n_u x n_x) doubles.
void write_pde_solution(const PDESolution& s, const std::filesystem::path& path);
PDESolution read_pde_solution(const std::filesystem::path& path);

inline constexpr std::uint32_t kPdeDumpVersion = 1;

}  // namespace parisi
