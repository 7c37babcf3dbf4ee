#include "parisi/criteria.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "parisi/gamma.hpp"
#include "parisi/quadrature.hpp"

namespace parisi {
namespace {

using quad = boost::multiprecision::cpp_bin_float_quad;

template <class T>
T thm3_margin_t(const Mixture& mix) {
  using std::log, std::max, std::pow, std::sqrt;
  using boost::multiprecision::log, boost::multiprecision::pow, boost::multiprecision::sqrt;
  const T xi1 = mix.eval_as<T>(T(1), 0);
  const T xp1 = mix.eval_as<T>(T(1), 1);
  const T a = T(8) * log(T(2));
  const T b = sqrt(xp1) * pow(T(2), xp1 / xi1 + T(5)) / T(3);
  return xi1 - (a > b ? a : b);
}

template <class T>
T thm4_lhs_t(const Mixture& mix) {
  using std::sqrt;
  using boost::multiprecision::sqrt;
  return mix.eval_as<T>(T(1), 3) / T(6) + T(2) / T(3) * sqrt(mix.eval_as<T>(T(1), 2));
}

}  // namespace

std::optional<double> check_thm1_gap(const Mixture& mix) {
  if (mix.eval(0.0, 2) >= 1.0) return std::nullopt;
  if (mix.eval(1.0, 2) < 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (mix.eval(mid, 2) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double thm3_margin_quad(const Mixture& mix) { return static_cast<double>(thm3_margin_t<quad>(mix)); }
double thm4_lhs_quad(const Mixture& mix) { return static_cast<double>(thm4_lhs_t<quad>(mix)); }

CriteriaReport check_rsb_criteria(const Mixture& mix) {
  CriteriaReport r;
  r.q_hat_gap = check_thm1_gap(mix);
  r.thm3_margin = thm3_margin_t<double>(mix);
  r.thm3_satisfied = r.thm3_margin > 0.0;
  r.beta2 = std::sqrt(mix.coefficient(2));
  r.thm4_lhs = thm4_lhs_t<double>(mix);
  const double lo = 1.0 / std::numbers::sqrt2;
  const double hi = 3.0 / (2.0 * std::numbers::sqrt2);
  r.thm4_satisfied = r.beta2 > lo && r.beta2 <= hi && r.thm4_lhs <= 1.0;
  r.thm4_margin = std::min({r.beta2 - lo, hi - r.beta2, 1.0 - r.thm4_lhs});
  if (r.thm3_satisfied) r.notes.push_back("support of the Parisi measure has at least three points");
  if (r.thm4_satisfied) r.notes.push_back("Parisi measure jumps at the top of its support");
  if (r.q_hat_gap) r.notes.push_back("no mass in (0, q_hat) beyond the atom at 0");
  return r;
}

MomentBound moment_bound_check(const Mixture& mix, const RSBMeasure& mu) {
  return moment_bound_check(mix, GeneralMeasure::from_rsb(mu));
}

MomentBound moment_bound_check(const Mixture& mix, const GeneralMeasure& mu) {
  const double xi1 = mix.eval(1.0);
  MomentBound b;
  for (const auto& a : mu.atoms()) b.lhs += a.mass * mix.eval(a.q) / xi1;
  for (const auto& s : mu.segments()) {
    const double h = (s.b - s.a) / static_cast<double>(s.values.size() - 1);
    for (std::size_t i = 0; i + 1 < s.values.size(); ++i) {
      const double u0 = s.a + h * static_cast<double>(i);
      const double u1 = i + 2 == s.values.size() ? s.b : u0 + h;
      const double v0 = s.values[i], v1 = s.values[i + 1];
      b.lhs += integrate(
          [&](double u) { return (v0 + (v1 - v0) * (u - u0) / (u1 - u0)) * mix.eval(u) / xi1; }, u0, u1);
    }
  }
  b.rhs = 1.0 - std::sqrt(2.0 * std::log(2.0) / xi1);
  b.satisfied = b.lhs >= b.rhs - 1e-9;
  return b;
}

GaussianSelfTest gaussian_selftest(const std::vector<double>& identity_points,
                                   const std::vector<double>& mills_points) {
  GaussianSelfTest t;
  const double inv_root = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (double a : identity_points) {
    GaussianIdentityRow row;
    row.a = a;
    row.quadrature = 2.0 * integrate([&](double s) { return std::exp(a * s - 0.5 * s * s) * inv_root; }, 0.0,
                                     std::numeric_limits<double>::infinity(), 1e-15);
    row.closed_form = 2.0 * std::exp(0.5 * a * a) * 0.5 * std::erfc(-a / std::numbers::sqrt2);
    row.residual = std::abs(row.quadrature - row.closed_form);
    t.max_identity_residual = std::max(t.max_identity_residual, row.residual);
    t.identity.push_back(row);
  }
  t.mills_hold = true;
  for (double a : mills_points) {
    MillsRow row;
    row.a = a;
    const double c = std::abs(a);
    row.value = integrate([&](double s) { return std::exp(0.5 * (c * c - s * s)); }, c,
                          std::numeric_limits<double>::infinity(), 1e-15);
    row.lower = 3.0 / (4.0 * c);
    row.upper = 1.0 / c;
    row.holds = row.lower <= row.value && row.value <= row.upper;
    t.mills_hold = t.mills_hold && row.holds;
    t.mills.push_back(row);
  }
  return t;
}

std::vector<ConsistencyPoint> density_consistency(const Mixture& mix, const RSBMeasure& mu, double a, double b,
                                                  int n_points) {
  std::vector<double> us;
  for (int i = 0; i < n_points; ++i) {
    us.push_back(n_points == 1 ? a : a + (b - a) * i / (n_points - 1));
  }
  const auto rep = gamma_report(mix, mu, us);
  std::vector<ConsistencyPoint> out;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const double u = us[i];
    const double x2 = mix.eval(u, 2);
    const double x3 = mix.eval(u, 3);
    ConsistencyPoint p;
    p.u = u;
    p.x_mu = mu.cdf(u);
    if (x2 > 0.0) {
      const double zeta = x3 / (x2 * x2);
      const double f1 = rep.gamma_prime[i] / x2;
      const double f2 = (rep.gamma1[i] - x3 * f1) / (x2 * x2);
      const double f3 = rep.gamma2[i] / (x2 * x2);
      p.rhs = (zeta * f1 + f2) / f3;
    } else {
      p.rhs = std::numeric_limits<double>::quiet_NaN();
    }
    p.residual = std::abs(p.x_mu - p.rhs);
    out.push_back(p);
  }
  return out;
}

}  // namespace parisi
