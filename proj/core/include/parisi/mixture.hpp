#pragma once

#include <map>

namespace parisi {

/// Covariance function xi(u) = sum_p beta_p^2 u^p of a mixed p-spin model.
///
/// Coefficients are stored as beta_p^2 keyed by p >= 2. Instances are
/// immutable once validated.
class Mixture {
 public:
  /// Throws Error{KeyBelowTwo | NegativeCoefficient | EmptyMixture}.
  static Mixture validate(const std::map<int, double>& raw);

  /// Single-term mixture beta^2 u^p, handy for the SK (p = 2) and pure models.
  static Mixture pure(int p, double beta_sq);

  const std::map<int, double>& coeffs() const noexcept { return coeffs_; }

  /// beta_p^2, or 0 when p is absent.
  double coefficient(int p) const noexcept;

  /// xi^{(order)}(u) by termwise differentiation; u must lie in [0, 1].
  double eval(double u, int order = 0) const;

  /// Same polynomial evaluated in another floating type without the domain
  /// check (used by the extended-precision condition checkers).
  template <class T>
  T eval_as(T u, int order) const {
    T sum = 0;
    for (const auto& [p, c] : coeffs_) {
      if (order > p) continue;
      T falling = 1;
      for (int i = 0; i < order; ++i) falling *= static_cast<T>(p - i);
      T power = 1;
      for (int i = 0; i < p - order; ++i) power *= u;
      sum += static_cast<T>(c) * falling * power;
    }
    return sum;
  }

  int max_degree() const noexcept { return coeffs_.rbegin()->first; }

 private:
  explicit Mixture(std::map<int, double> coeffs) : coeffs_(std::move(coeffs)) {}

  std::map<int, double> coeffs_;
};

inline Mixture validate_mixture(const std::map<int, double>& raw) {
  return Mixture::validate(raw);
}

inline double eval_mixture(const Mixture& m, double u, int order) {
  return m.eval(u, order);
}

}  // namespace parisi
