#include "parisi/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "parallel.hpp"
#include "parisi/error.hpp"
#include "parisi/quadrature.hpp"
#include "pde_kernel.hpp"
#include "rng.hpp"

namespace parisi {
namespace {

constexpr double kMassTol = 1e-4;

struct Level {
  std::size_t index = 0;
  double start = 0.0;
  double m = 1.0;
};

Level level_for(const PDESolution& s, double u) {
  const auto& lv = s.levels();
  const std::size_t i = lv.level_of(u);
  Level out;
  out.index = i;
  out.start = lv.breaks[i];
  out.m = i < lv.x_values.size() ? lv.x_values[i] : 1.0;
  return out;
}

void check_mass(double raw, double u) {
  if (!(std::abs(raw - 1.0) <= kMassTol)) {
    throw Error(ErrorCode::MassLeak, "tilted mass " + std::to_string(raw) + " at u=" + std::to_string(u));
  }
}

// Masses at grid nodes of the tilted law at u, from the level-start masses.
// Returns the pre-renormalization total.
double push_forward(const PDESolution& s, const std::vector<double>& start_mass, const Slice& start,
                    const Slice& target, double m, double var, std::vector<double>& out) {
  const auto& x = s.x_grid();
  const std::size_t n = x.size();
  const double dx = s.dx();
  out.assign(n, 0.0);
  double peak = 0.0;
  for (double v : start_mass) peak = std::max(peak, v);
  const double floor = peak * 1e-20;
  if (var <= 0.0) {
    out = start_mass;
    double t = 0.0;
    for (double v : out) t += v;
    return t;
  }
  const double sigma = std::sqrt(var);
  if (sigma >= 3.0 * dx) {
    const auto reach = static_cast<std::ptrdiff_t>(std::ceil(8.5 * sigma / dx));
    const double norm = dx / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const double inv2v = 1.0 / (2.0 * var);
    detail::parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t j = lo; j < hi; ++j) {
        const auto jj = static_cast<std::ptrdiff_t>(j);
        const auto i0 = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, jj - reach));
        const auto i1 = static_cast<std::size_t>(std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, jj + reach));
        double acc = 0.0;
        for (std::size_t i = i0; i <= i1; ++i) {
          if (start_mass[i] <= floor) continue;
          const double d = x[j] - x[i];
          acc += start_mass[i] * std::exp(m * (target.phi[j] - start.phi[i]) - d * d * inv2v);
        }
        out[j] = acc * norm;
      }
    });
  } else {
    const auto& gh = gauss_hermite(s.grid().quad_order);
    const detail::GridView view{s.grid().x_max, dx};
    double v[4];
    for (std::size_t i = 0; i < n; ++i) {
      if (start_mass[i] <= floor) continue;
      for (std::size_t l = 0; l < gh.size(); ++l) {
        const double y = x[i] + sigma * gh.nodes[l];
        view.sample(target, y, v, false);
        const double w = start_mass[i] * gh.weights[l] * std::exp(m * (v[0] - start.phi[i]));
        // cubic Lagrange deposition keeps mass and the first three moments
        const double t = std::clamp((y - x[0]) / dx, 0.0, static_cast<double>(n - 1));
        auto j = static_cast<std::ptrdiff_t>(std::floor(t));
        j = std::clamp<std::ptrdiff_t>(j, 1, static_cast<std::ptrdiff_t>(n) - 3);
        const double th = t - static_cast<double>(j);
        const auto k = static_cast<std::size_t>(j - 1);
        out[k] += w * (-th * (th - 1.0) * (th - 2.0) / 6.0);
        out[k + 1] += w * ((th + 1.0) * (th - 1.0) * (th - 2.0) / 2.0);
        out[k + 2] += w * (-(th + 1.0) * th * (th - 2.0) / 2.0);
        out[k + 3] += w * ((th + 1.0) * th * (th - 1.0) / 6.0);
      }
    }
  }
  double total = 0.0;
  for (double v : out) total += v;
  return total;
}

struct Moments {
  double mass = 0.0;
  double d1sq = 0.0;
  double d2sq = 0.0;
  double d3sq = 0.0;
  double d2cube = 0.0;
};

Moments moments_at(const TiltedDensity& td, const PDESolution& s, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::DomainError, "u outside [0,1]");
  const Level lv = level_for(s, u);
  const auto& start_mass = td.level_mass.at(lv.index);
  const Slice& start = s.level_slice(lv.index);
  const auto& us = s.u_slices();
  const auto it = std::lower_bound(us.begin(), us.end(), u);
  Slice fresh;
  const Slice* target = nullptr;
  if (it != us.end() && *it == u) {
    target = &s.slice(static_cast<std::size_t>(it - us.begin()));
  } else {
    fresh = s.exact_slice(u);
    target = &fresh;
  }
  const auto& mix = s.mixture();
  const double var = std::max(0.0, mix.eval(u, 1) - mix.eval(lv.start, 1));
  const double sigma = std::sqrt(var);
  const auto& gh = gauss_hermite(s.grid().quad_order);
  const auto& x = s.x_grid();
  double peak = 0.0;
  for (double v : start_mass) peak = std::max(peak, v);
  const double floor = peak * 1e-20;
  Moments mo;
  double v[4];
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = start_mass[i];
    if (p <= floor) continue;
    if (sigma == 0.0) {
      const double a = target->d1[i], b = target->d2[i], c = target->d3[i];
      mo.mass += p;
      mo.d1sq += p * a * a;
      mo.d2sq += p * b * b;
      mo.d3sq += p * c * c;
      mo.d2cube += p * b * b * b;
      continue;
    }
    for (std::size_t l = 0; l < gh.size(); ++l) {
      s.sample(*target, x[i] + sigma * gh.nodes[l], v);
      const double w = p * gh.weights[l] * std::exp(lv.m * (v[0] - start.phi[i]));
      mo.mass += w;
      mo.d1sq += w * v[1] * v[1];
      mo.d2sq += w * v[2] * v[2];
      mo.d3sq += w * v[3] * v[3];
      mo.d2cube += w * v[2] * v[2] * v[2];
    }
  }
  check_mass(mo.mass, u);
  mo.d1sq /= mo.mass;
  mo.d2sq /= mo.mass;
  mo.d3sq /= mo.mass;
  mo.d2cube /= mo.mass;
  return mo;
}

}  // namespace

double TiltedDensity::max_mass_drift() const {
  double d = 0.0;
  for (double m : raw_mass) d = std::max(d, std::abs(m - 1.0));
  for (double m : level_raw_mass) d = std::max(d, std::abs(m - 1.0));
  return d;
}

TiltedDensity tilted_density(const Mixture& mix, const PDESolution& s, bool materialize) {
  TiltedDensity td;
  td.x_grid = s.x_grid();
  const std::size_t n = td.x_grid.size();
  const auto& lv = s.levels();
  const std::size_t L = lv.x_values.size();
  td.level_mass.assign(L + 1, std::vector<double>(n, 0.0));
  td.level_mass[0][s.center()] = 1.0;
  td.level_raw_mass.assign(L + 1, 1.0);
  for (std::size_t i = 0; i < L; ++i) {
    const double var = mix.eval(lv.breaks[i + 1], 1) - mix.eval(lv.breaks[i], 1);
    auto& next = td.level_mass[i + 1];
    const double raw = push_forward(s, td.level_mass[i], s.level_slice(i), s.level_slice(i + 1),
                                    lv.x_values[i], var, next);
    td.level_raw_mass[i + 1] = raw;
    check_mass(raw, lv.breaks[i + 1]);
    for (double& v : next) v /= raw;
  }
  if (!materialize) return td;
  td.u_slices = s.u_slices();
  td.rho.resize(td.u_slices.size());
  td.raw_mass.resize(td.u_slices.size());
  std::vector<double> mass;
  for (std::size_t iu = 0; iu < td.u_slices.size(); ++iu) {
    const double u = td.u_slices[iu];
    const Level l = level_for(s, u);
    const double var = std::max(0.0, mix.eval(u, 1) - mix.eval(l.start, 1));
    const double raw = push_forward(s, td.level_mass[l.index], s.level_slice(l.index), s.slice(iu), l.m,
                                    var, mass);
    td.raw_mass[iu] = raw;
    check_mass(raw, u);
    auto& rho = td.rho[iu];
    rho.resize(n);
    for (std::size_t j = 0; j < n; ++j) rho[j] = mass[j] / (raw * s.dx());
  }
  return td;
}

GammaReport gamma_curve(const TiltedDensity& td, const PDESolution& s, const std::vector<double>& u_samples) {
  GammaReport r;
  r.u_samples = u_samples;
  for (double u : u_samples) {
    const Moments mo = moments_at(td, s, u);
    r.gamma.push_back(mo.d1sq);
    r.mass.push_back(mo.mass);
  }
  return r;
}

GammaReport gamma_derivatives(const TiltedDensity& td, const PDESolution& s,
                              const std::vector<double>& u_samples) {
  const auto& mix = s.mixture();
  const auto& mu = s.measure();
  GammaReport r;
  r.u_samples = u_samples;
  for (double u : u_samples) {
    const Moments mo = moments_at(td, s, u);
    const double x2 = mix.eval(u, 2);
    const double x3 = mix.eval(u, 3);
    const double g1 = x3 * mo.d2sq + x2 * x2 * mo.d3sq;
    const double g2 = 2.0 * x2 * x2 * mo.d2cube;
    r.gamma.push_back(mo.d1sq);
    r.gamma_prime.push_back(x2 * mo.d2sq);
    r.gamma1.push_back(g1);
    r.gamma2.push_back(g2);
    r.gamma_pp_right.push_back(g1 - mu.cdf(u) * g2);
    r.gamma_pp_left.push_back(g1 - mu.cdf_left(u) * g2);
    r.mass.push_back(mo.mass);
  }
  return r;
}

GammaMonteCarlo mc_gamma_oracle(const PDESolution& s, double u, std::size_t n_paths, std::uint64_t seed) {
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::DomainError, "u outside [0,1]");
  if (n_paths < 2) throw Error(ErrorCode::InvalidArgument, "need at least two paths");
  const auto& mix = s.mixture();
  std::vector<Atom> atoms;
  for (const auto& a : s.measure().support()) {
    if (a.q <= u) atoms.push_back(a);
  }
  std::vector<double> times{u};
  for (const auto& a : atoms) times.push_back(a.q);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<Slice> slices;
  for (double t : times) slices.push_back(s.exact_slice(t));
  std::vector<double> sd(times.size());
  sd[0] = std::sqrt(std::max(0.0, mix.eval(times[0], 1)));
  for (std::size_t i = 1; i < times.size(); ++i) {
    sd[i] = std::sqrt(std::max(0.0, mix.eval(times[i], 1) - mix.eval(times[i - 1], 1)));
  }
  std::vector<std::size_t> at;
  for (const auto& a : atoms) {
    at.push_back(static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), a.q) - times.begin()));
  }
  const std::size_t top = times.size() - 1;
  const std::size_t chunks = detail::kMonteCarloChunks;
  std::vector<double> s1(chunks), s2(chunks), e1(chunks), e2(chunks);
  detail::parallel_for(chunks, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> path(times.size());
    double v[4];
    for (std::size_t c = lo; c < hi; ++c) {
      std::mt19937_64 rng(detail::splitmix64(seed ^ (0x51ed2701ULL + c)));
      std::normal_distribution<double> normal;
      const std::size_t n = n_paths / chunks + (c < n_paths % chunks ? 1 : 0);
      for (std::size_t p = 0; p < n; ++p) {
        double m = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
          m += sd[i] * normal(rng);
          path[i] = m;
        }
        s.sample(slices[top], path[top], v);
        const double end = v[0];
        const double slope = v[1];
        double w = 0.0;
        for (std::size_t a = 0; a < atoms.size(); ++a) {
          s.sample(slices[at[a]], path[at[a]], v);
          w += atoms[a].mass * (end - v[0]);
        }
        const double ew = std::exp(w);
        const double val = slope * slope * ew;
        s1[c] += val;
        s2[c] += val * val;
        e1[c] += ew;
        e2[c] += ew * ew;
      }
    }
  }, 1);
  auto finish = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
      t1 += a[c];
      t2 += b[c];
    }
    const double n = static_cast<double>(n_paths);
    const double mean = t1 / n;
    const double var = std::max(0.0, (t2 - n * mean * mean) / (n - 1.0));
    return std::pair{mean, std::sqrt(var / n)};
  };
  const auto [g, gse] = finish(s1, s2);
  const auto [e, ese] = finish(e1, e2);
  return {g, gse, e, ese};
}

GammaMonteCarlo mc_gamma_oracle(const Mixture& mix, const RSBMeasure& mu, double u, std::size_t n_paths,
                                std::uint64_t seed) {
  GridParams g = GridParams::defaults(mix);
  g.n_u = 0;
  return mc_gamma_oracle(solve_pde(mix, mu, g), u, n_paths, seed);
}

GammaReport gamma_report(const Mixture& mix, const RSBMeasure& mu, const std::vector<double>& u_samples) {
  GridParams g = GridParams::defaults(mix);
  g.n_u = 0;
  const PDESolution s = solve_pde(mix, mu, g);
  const TiltedDensity td = tilted_density(mix, s, false);
  return gamma_derivatives(td, s, u_samples);
}

}  // namespace parisi
