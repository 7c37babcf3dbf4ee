#include "parisi/mixture.hpp"

#include <cmath>
#include <string>

#include "parisi/error.hpp"

namespace parisi {

Mixture Mixture::validate(const std::map<int, double>& raw) {
  std::map<int, double> kept;
  bool any_positive = false;
  double growth = 0.0;
  for (const auto& [p, c] : raw) {
    if (p < 2) {
      throw Error(ErrorCode::KeyBelowTwo, "mixture key p = " + std::to_string(p) + " is below 2");
    }
    if (!std::isfinite(c) || c < 0.0) {
      throw Error(ErrorCode::NegativeCoefficient,
                  "beta_" + std::to_string(p) + "^2 = " + std::to_string(c));
    }
    if (c > 0.0) {
      any_positive = true;
      growth += std::ldexp(c, p);
    }
    kept.emplace(p, c);
  }
  if (!any_positive) {
    throw Error(ErrorCode::EmptyMixture, "mixture needs at least one positive coefficient");
  }
  if (!std::isfinite(growth)) {
    throw Error(ErrorCode::RangeViolation, "sum_p 2^p beta_p^2 is not finite");
  }
  return Mixture(std::move(kept));
}

Mixture Mixture::pure(int p, double beta_sq) { return validate({{p, beta_sq}}); }

double Mixture::coefficient(int p) const noexcept {
  auto it = coeffs_.find(p);
  return it == coeffs_.end() ? 0.0 : it->second;
}

double Mixture::eval(double u, int order) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw Error(ErrorCode::DomainError, "mixture evaluated at u = " + std::to_string(u));
  }
  if (order < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative derivative order");
  }
  return eval_as<double>(u, order);
}

}  // namespace parisi
