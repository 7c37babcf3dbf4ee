#include "parisi/functional.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "parisi/error.hpp"
#include "parisi/gamma.hpp"
#include "parisi/quadrature.hpp"

namespace parisi {

PerturbationField PerturbationField::make(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.size() != values.size() || nodes.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "perturbation needs matching node and value lists");
  }
  if (nodes.front() != 0.0 || nodes.back() != 1.0) {
    throw Error(ErrorCode::InvalidArgument, "perturbation nodes must span [0,1]");
  }
  constexpr double eps = 1e-12;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0 && !(nodes[i] > nodes[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "perturbation nodes must increase");
    }
    const double moved = nodes[i] + values[i];
    if (moved < -eps || moved > 1.0 + eps) {
      throw Error(ErrorCode::InvalidArgument, "u + a(u) leaves [0,1] at u=" + std::to_string(nodes[i]));
    }
    if (i > 0) {
      const double slope = (values[i] - values[i - 1]) / (nodes[i] - nodes[i - 1]);
      if (std::abs(slope) > 1.0 + eps) {
        throw Error(ErrorCode::InvalidArgument, "perturbation slope exceeds 1");
      }
    }
  }
  return PerturbationField(std::move(nodes), std::move(values));
}

PerturbationField PerturbationField::zero() { return make({0.0, 1.0}, {0.0, 0.0}); }

PerturbationField PerturbationField::hat(double c, double half_width, double height) {
  if (!(half_width > 0.0) || std::abs(height) > half_width) {
    throw Error(ErrorCode::InvalidArgument, "hat needs |height| <= half_width");
  }
  std::vector<double> n{0.0}, v;
  const double lo = c - half_width, hi = c + half_width;
  auto tent = [&](double u) {
    if (u <= lo || u >= hi) return 0.0;
    return height * (1.0 - std::abs(u - c) / half_width);
  };
  for (double u : {lo, c, hi}) {
    if (u > 0.0 && u < 1.0) n.push_back(u);
  }
  n.push_back(1.0);
  for (double u : n) v.push_back(tent(u));
  return make(std::move(n), std::move(v));
}

double PerturbationField::operator()(double u) const {
  if (u <= nodes_.front()) return values_.front();
  if (u >= nodes_.back()) return values_.back();
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), u);
  const auto i = static_cast<std::size_t>(it - nodes_.begin());
  const double w = (u - nodes_[i - 1]) / (nodes_[i] - nodes_[i - 1]);
  return (1.0 - w) * values_[i - 1] + w * values_[i];
}

double parisi_correction(const Mixture& mix, const RSBMeasure& mu) {
  auto G = [&](double u) { return u * mix.eval(u, 1) - mix.eval(u, 0); };
  const auto lv = LevelStructure::from(mu);
  double sum = 0.0;
  for (std::size_t i = 0; i < lv.x_values.size(); ++i) {
    sum += lv.x_values[i] * (G(lv.breaks[i + 1]) - G(lv.breaks[i]));
  }
  sum += G(1.0) - G(lv.breaks.back());
  return 0.5 * sum;
}

double parisi_value(const Mixture& mix, const RSBMeasure& mu, const GridParams& grid) {
  return phi_at_origin(mix, mu, grid) - parisi_correction(mix, mu);
}

double parisi_value(const Mixture& mix, const RSBMeasure& mu) {
  return parisi_value(mix, mu, GridParams::defaults(mix));
}

double parisi_value(const PDESolution& s) {
  return s.eval(0.0, 0.0, 0) - parisi_correction(s.mixture(), s.measure());
}

double free_energy(double parisi_value_) { return std::log(2.0) + parisi_value_; }

double recursion_oracle(const Mixture& mix, const RSBMeasure& mu, int quad_order) {
  const int k = mu.k();
  if (k > 3) throw Error(ErrorCode::LevelCapExceeded, "recursion oracle supports k <= 3");
  const auto& gh = gauss_hermite(quad_order);
  const auto& m = mu.m();
  const auto& q = mu.q();
  // z_p has variance xi'(q_{p+1}) - xi'(q_p) for p = 0..k+1.
  std::vector<double> sd(static_cast<std::size_t>(k + 2));
  for (int p = 0; p <= k + 1; ++p) {
    const auto i = static_cast<std::size_t>(p);
    sd[i] = std::sqrt(std::max(0.0, mix.eval(q[i + 1], 1) - mix.eval(q[i], 1)));
  }
  auto log_cosh = [](double y) {
    const double a = std::abs(y);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
  };
  std::function<double(int, double)> X = [&](int p, double s) -> double {
    if (p == k + 2) return log_cosh(s);
    const auto i = static_cast<std::size_t>(p);
    if (sd[i] == 0.0) return X(p + 1, s);
    std::vector<double> vals(gh.size());
    double vmax = -INFINITY;
    for (std::size_t l = 0; l < gh.size(); ++l) {
      vals[l] = X(p + 1, s + sd[i] * gh.nodes[l]);
      vmax = std::max(vmax, vals[l]);
    }
    const double mp = m[i];
    double acc = 0.0;
    if (mp == 0.0) {
      for (std::size_t l = 0; l < gh.size(); ++l) acc += gh.weights[l] * vals[l];
      return acc;
    }
    for (std::size_t l = 0; l < gh.size(); ++l) acc += gh.weights[l] * std::exp(mp * (vals[l] - vmax));
    return vmax + std::log(acc) / mp;
  };
  const double x0 = X(0, 0.0);
  auto theta = [&](double u) { return u * mix.eval(u, 1) - mix.eval(u, 0); };
  double corr = 0.0;
  for (int p = 1; p <= k + 1; ++p) {
    const auto i = static_cast<std::size_t>(p);
    corr += m[i] * (theta(q[i + 1]) - theta(q[i]));
  }
  return x0 - 0.5 * corr;
}

RSBMeasure perturb(const RSBMeasure& mu, const PerturbationField& a, double t) {
  std::vector<Atom> atoms;
  for (const auto& at : mu.support()) {
    atoms.push_back({std::clamp(at.q + t * a(at.q), 0.0, 1.0), at.mass});
  }
  return RSBMeasure::from_atoms(std::move(atoms));
}

double directional_derivative(const Mixture& mix, const RSBMeasure& mu, const PerturbationField& a,
                              const GammaReport& gamma) {
  double sum = 0.0;
  for (const auto& at : mu.support()) {
    const auto& us = gamma.u_samples;
    const auto it = std::find_if(us.begin(), us.end(), [&](double u) { return std::abs(u - at.q) <= 1e-12; });
    if (it == us.end()) {
      throw Error(ErrorCode::MissingGammaSample, "no Gamma sample at q=" + std::to_string(at.q));
    }
    const double g = gamma.gamma[static_cast<std::size_t>(it - us.begin())];
    sum += at.mass * mix.eval(at.q, 2) * (at.q - g) * a(at.q);
  }
  return 0.5 * sum;
}

}  // namespace parisi
