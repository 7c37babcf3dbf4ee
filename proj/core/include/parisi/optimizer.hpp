#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"
#include "parisi/parisi_pde.hpp"

namespace parisi {

struct OptimizerOptions {
  int n_starts = 8;
  int max_k = 8;
  double improve_tol = 1e-7;
  /// Function evaluations per Nelder-Mead run (per start).
  int max_evals = 4000;
  double ftol = 1e-13;
  std::uint64_t seed = 0;
  /// Grid used for objective evaluations; defaults when x_max == 0.
  GridParams grid{};
};

struct FixedKResult {
  RSBMeasure measure = RSBMeasure::dirac(0.0);
  double value = 0.0;
  bool budget_exhausted = false;
  int evaluations = 0;
};

struct TraceEntry {
  int k = 0;
  double value = 0.0;
};

struct AdaptiveResult {
  RSBMeasure measure = RSBMeasure::dirac(0.0);
  double value = 0.0;
  std::vector<TraceEntry> trace;
  bool budget_exhausted = false;
};

/// Merges atoms closer than 1e-4, drops atoms lighter than 1e-6 and snaps
/// atoms below 1e-4 to the origin.
RSBMeasure clean_measure(const RSBMeasure& mu);

/// Nelder-Mead over the 2k+1 free triplet parameters, through a softmax gap
/// parameterization that keeps every iterate admissible. Multi-start.
/// The best value found is always returned; budget_exhausted flags runs that
/// hit max_evals before converging.
FixedKResult minimize_fixed_k(const Mixture& mix, int k, const OptimizerOptions& opts = {},
                              const std::vector<RSBMeasure>& seeds = {});

/// Escalates k = 0, 1, ... warm-starting each level from the previous
/// optimum with a new atom at the worst Gamma residual. Stops when the gain
/// is below improve_tol or k reaches max_k.
AdaptiveResult minimize_adaptive(const Mixture& mix, const OptimizerOptions& opts = {});

enum class Verdict {
  ConsistentMinimizer,
  ViolatesGammaFixedPoint,
  ViolatesGammaSlope,
  ViolatesOrigin,
  ViolatesMomentBound,
};

std::string_view to_string(Verdict v) noexcept;

struct Certificate {
  std::vector<Atom> support_estimate;
  std::vector<double> gamma_at_support;
  std::vector<double> gamma_prime_at_support;
  double gamma_residual = 0.0;
  double gamma_prime_max = 0.0;
  bool origin_in_support = false;
  double origin_mass = 0.0;
  double moment_bound_lhs = 0.0;
  double moment_bound_rhs = 0.0;
  Verdict verdict = Verdict::ConsistentMinimizer;
};

/// Checks the necessary conditions Gamma(q) = q and Gamma'(q) <= 1 on the
/// support, an atom at 0, and the moment bound. A consistent verdict is not
/// a proof of optimality. The verdict is the first failure in the order
/// origin, fixed point, slope, moment bound.
Certificate certify(const Mixture& mix, const RSBMeasure& mu, double tol = 1e-3);

}  // namespace parisi
