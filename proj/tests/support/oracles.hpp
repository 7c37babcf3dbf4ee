#pragma once

// Reference computations used by the tests. Nothing here calls into the
// library's quadrature so a shared bug cannot cancel out.

#include <algorithm>
#include <cmath>
#include <map>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"

namespace oracle {

struct Rule {
  std::vector<double> z;
  std::vector<double> w;
};

// Orthonormal Hermite polynomial (weight e^{-x^2}) of degree n and the
// derivative scale sqrt(2n) p_{n-1}.
inline void hermite_eval(int n, double x, double& pn, double& dpn) {
  double p1 = std::pow(std::numbers::pi, -0.25), p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = x * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
  }
  pn = p1;
  dpn = std::sqrt(2.0 * n) * p2;
}

// Gauss-Hermite for the standard normal: roots bracketed by a sign scan,
// refined by bisection, weights 2 / (p_n')^2 normalized to sum 1.
inline Rule hermite(int n) {
  std::vector<double> roots;
  const double top = std::sqrt(2.0 * n + 1.0) + 1.0;
  const double step = 1e-3;
  double pa = 0.0, d = 0.0;
  hermite_eval(n, -top, pa, d);
  for (double a = -top; a < top; a += step) {
    double pb = 0.0;
    hermite_eval(n, a + step, pb, d);
    if ((pa < 0.0) != (pb < 0.0)) {
      double lo = a, hi = a + step, plo = pa;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        double pm = 0.0;
        hermite_eval(n, mid, pm, d);
        if ((pm < 0.0) == (plo < 0.0)) {
          lo = mid;
          plo = pm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    pa = pb;
  }
  if (static_cast<int>(roots.size()) != n) throw std::runtime_error("hermite: root scan missed roots");
  Rule r;
  double total = 0.0;
  for (double x : roots) {
    double p = 0.0, dp = 0.0;
    hermite_eval(n, x, p, dp);
    r.z.push_back(x * std::numbers::sqrt2);
    r.w.push_back(2.0 / (dp * dp));
    total += r.w.back();
  }
  for (double& w : r.w) w /= total;
  return r;
}

inline double expect(const std::function<double(double)>& f, int n = 200) {
  static thread_local int cached_n = 0;
  static thread_local Rule rule;
  if (cached_n != n) {
    rule = hermite(n);
    cached_n = n;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < rule.z.size(); ++i) s += rule.w[i] * f(rule.z[i]);
  return s;
}

inline double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// Phi for mu = delta_0.
inline double phi_delta0(const parisi::Mixture& mix, double x, double u) {
  return log_cosh(x) + 0.5 * (mix.eval(1.0, 1) - mix.eval(u, 1));
}

// Gamma(u) for mu = delta_0: E tanh^2(z sqrt(t) + t), t = xi'(u).
inline double gamma_delta0(const parisi::Mixture& mix, double u) {
  const double t = mix.eval(u, 1);
  return expect([&](double z) { const double v = std::tanh(z * std::sqrt(t) + t); return v * v; });
}

// 1RSB at level q with parameter m: Phi(0,0) in closed form.
inline double phi00_1rsb(const parisi::Mixture& mix, double m, double q) {
  const double s = std::sqrt(mix.eval(q, 1));
  const double e = expect([&](double z) { return std::exp(m * log_cosh(s * z)); });
  return std::log(e) / m + 0.5 * (mix.eval(1.0, 1) - mix.eval(q, 1));
}

// Gamma'(q) for the 1RSB measure with an atom at 0 (mass m) and at q.
inline double gamma_prime_1rsb(const parisi::Mixture& mix, double m, double q) {
  const double s = std::sqrt(mix.eval(q, 1));
  const double num = expect([&](double z) { return std::pow(std::cosh(s * z), m - 4.0); });
  const double den = expect([&](double z) { return std::pow(std::cosh(s * z), m); });
  return mix.eval(q, 2) * num / den;
}

inline double G(const parisi::Mixture& mix, double u) { return u * mix.eval(u, 1) - mix.eval(u); }

// 1/2 int u xi'' x_mu for a purely atomic measure, from first principles.
inline double correction(const parisi::Mixture& mix, const parisi::RSBMeasure& mu) {
  double c = 0.0, mass = 0.0;
  const auto atoms = mu.support();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    mass += atoms[i].mass;
    const double hi = i + 1 < atoms.size() ? atoms[i + 1].q : 1.0;
    c += mass * (G(mix, hi) - G(mix, atoms[i].q));
  }
  return 0.5 * c;
}

// Random mixture with up to three terms among p = 2, 3, 4.
inline parisi::Mixture random_mixture(std::mt19937_64& rng, double max_coef = 0.5) {
  std::uniform_real_distribution<double> c(0.05, max_coef);
  std::bernoulli_distribution keep(0.6);
  std::map<int, double> raw{{2, c(rng)}};
  for (int p : {3, 4}) {
    if (keep(rng)) raw[p] = c(rng);
  }
  return parisi::Mixture::validate(raw);
}

// Random k-RSB triplet with well separated levels.
inline parisi::RSBMeasure random_measure(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    std::vector<double> m{0.0}, q{0.0};
    std::vector<double> ms, qs;
    for (int i = 0; i < k; ++i) ms.push_back(0.1 + 0.8 * unit(rng));
    for (int i = 0; i <= k; ++i) qs.push_back(0.05 + 0.9 * unit(rng));
    std::sort(ms.begin(), ms.end());
    std::sort(qs.begin(), qs.end());
    bool ok = true;
    for (int i = 1; i < k; ++i) ok = ok && ms[i] - ms[i - 1] > 0.05;
    for (int i = 1; i <= k; ++i) ok = ok && qs[i] - qs[i - 1] > 0.05;
    if (!ok) continue;
    m.insert(m.end(), ms.begin(), ms.end());
    m.push_back(1.0);
    q.insert(q.end(), qs.begin(), qs.end());
    q.push_back(1.0);
    return parisi::RSBMeasure::make(k, m, q);
  }
}

}  // namespace oracle
