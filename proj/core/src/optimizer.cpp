#include "parisi/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "parallel.hpp"
#include "parisi/error.hpp"
#include "parisi/functional.hpp"
#include "parisi/gamma.hpp"
#include "rng.hpp"

namespace parisi {
namespace {

constexpr double kMergeDistance = 1e-4;
constexpr double kMinMass = 1e-6;
constexpr double kGapFloor = 1e-9;

// theta = (q logits a_0..a_k, m logits b_1..b_k); the last gap logit of each
// group is pinned to 0.
struct Param {
  int k = 0;

  std::size_t size() const { return static_cast<std::size_t>(2 * k + 1); }

  RSBMeasure decode(const std::vector<double>& th) const {
    const auto n = static_cast<std::size_t>(k + 1);
    std::vector<double> qa(th.begin(), th.begin() + static_cast<std::ptrdiff_t>(n));
    qa.push_back(0.0);
    std::vector<double> mb(th.begin() + static_cast<std::ptrdiff_t>(n), th.end());
    mb.push_back(0.0);
    const auto gaps = softmax(qa);
    const auto incs = softmax(mb);
    std::vector<Atom> atoms;
    double q = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      q += gaps[p];
      atoms.push_back({std::min(q, 1.0), incs[p]});
    }
    return RSBMeasure::from_atoms(std::move(atoms));
  }

  // Needs exactly k+1 atoms.
  std::vector<double> encode(const std::vector<Atom>& atoms) const {
    std::vector<double> gaps, incs;
    double prev = 0.0;
    for (const auto& a : atoms) {
      gaps.push_back(std::max(a.q - prev, kGapFloor));
      incs.push_back(std::max(a.mass, kGapFloor));
      prev = a.q;
    }
    const double last = std::max(1.0 - prev, kGapFloor);
    std::vector<double> th;
    for (double g : gaps) th.push_back(std::log(g / last));
    for (std::size_t p = 0; p + 1 < incs.size(); ++p) th.push_back(std::log(incs[p] / incs.back()));
    return th;
  }

  static std::vector<double> softmax(const std::vector<double>& a) {
    const double mx = *std::max_element(a.begin(), a.end());
    std::vector<double> e(a.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += e[i] = std::exp(a[i] - mx);
    for (double& v : e) v /= s;
    return e;
  }
};

struct NMResult {
  std::vector<double> x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

NMResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                     double step, double ftol, int max_evals) {
  const std::size_t n = x0.size();
  NMResult res;
  if (n == 0) {
    res.x = x0;
    res.f = f(x0);
    res.evals = 1;
    res.converged = true;
    return res;
  }
  // adaptive coefficients for higher dimensions
  const double dn = static_cast<double>(n);
  const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 1.0 / (2.0 * dn), delta = 1.0 - 1.0 / dn;
  std::vector<std::vector<double>> s(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += step;
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(s[i]);
  std::vector<std::size_t> idx(n + 1);
  while (true) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[n - 1];
    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) spread = std::max(spread, std::abs(s[i][d] - s[best][d]));
    }
    if (std::abs(fv[worst] - fv[best]) <= ftol && spread < 1e-6) {
      res.converged = true;
      break;
    }
    if (std::abs(fv[worst] - fv[best]) <= ftol * 1e-3) {
      res.converged = true;
      break;
    }
    if (evals >= max_evals) break;
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) c[d] += s[i][d] / dn;
    }
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) x[d] = c[d] + t * (s[worst][d] - c[d]);
      return x;
    };
    auto xr = along(-alpha);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      auto xe = along(-alpha * beta);
      const double fe = eval(xe);
      if (fe < fr) {
        s[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        s[worst] = std::move(xr);
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      s[worst] = std::move(xr);
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    auto xc = along(outside ? -alpha * gamma : gamma);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      s[worst] = std::move(xc);
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) s[i][d] = s[best][d] + delta * (s[i][d] - s[best][d]);
      fv[i] = eval(s[i]);
    }
  }
  const auto b = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = s[b];
  res.f = fv[b];
  res.evals = evals;
  return res;
}

GridParams objective_grid(const Mixture& mix, const OptimizerOptions& opts) {
  GridParams g = opts.grid.x_max > 0.0 ? opts.grid : GridParams::defaults(mix);
  g.n_u = 0;
  return g;
}

// Brings an atom list to exactly n atoms by splitting the heaviest atoms or
// merging the closest pair.
std::vector<Atom> resize_atoms(std::vector<Atom> atoms, std::size_t n) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.q < b.q; });
  while (atoms.size() > n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i + 1 < atoms.size(); ++i) {
      if (atoms[i + 1].q - atoms[i].q < atoms[best + 1].q - atoms[best].q) best = i;
    }
    const double m = atoms[best].mass + atoms[best + 1].mass;
    atoms[best].q = (atoms[best].q * atoms[best].mass + atoms[best + 1].q * atoms[best + 1].mass) / m;
    atoms[best].mass = m;
    atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  }
  while (atoms.size() < n) {
    const auto it = std::max_element(atoms.begin(), atoms.end(),
                                     [](const Atom& a, const Atom& b) { return a.mass < b.mass; });
    Atom extra = *it;
    it->mass *= 0.999;
    extra.mass *= 0.001;
    extra.q = std::min(1.0 - 1e-6, extra.q + 1e-6);
    atoms.push_back(extra);
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.q < b.q; });
  }
  return atoms;
}

}  // namespace

RSBMeasure clean_measure(const RSBMeasure& mu) {
  std::vector<Atom> atoms;
  for (const auto& a : mu.support()) {
    if (a.mass < kMinMass) continue;
    atoms.push_back({a.q < kMergeDistance ? 0.0 : a.q, a.mass});
  }
  if (atoms.empty()) return mu;
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.q < b.q; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && a.q - merged.back().q < kMergeDistance) {
      auto& b = merged.back();
      const double m = a.mass + b.mass;
      if (b.q != 0.0) b.q = (b.q * b.mass + a.q * a.mass) / m;
      b.mass = m;
    } else {
      merged.push_back(a);
    }
  }
  double total = 0.0;
  for (const auto& a : merged) total += a.mass;
  for (auto& a : merged) a.mass /= total;
  return RSBMeasure::from_atoms(std::move(merged));
}

FixedKResult minimize_fixed_k(const Mixture& mix, int k, const OptimizerOptions& opts,
                              const std::vector<RSBMeasure>& seeds) {
  if (k < 0 || k > 8) throw Error(ErrorCode::InvalidArgument, "k must lie in [0, 8]");
  const Param par{k};
  const GridParams grid = objective_grid(mix, opts);
  auto objective = [&](const std::vector<double>& th) {
    return parisi_value(mix, par.decode(th), grid);
  };
  std::vector<std::vector<double>> starts;
  for (const auto& s : seeds) starts.push_back(par.encode(resize_atoms(s.support(), static_cast<std::size_t>(k + 1))));
  // delta_0 and an evenly spread measure are always among the candidates
  starts.push_back(par.encode(resize_atoms({{0.0, 1.0}}, static_cast<std::size_t>(k + 1))));
  std::mt19937_64 rng(detail::splitmix64(opts.seed + 1000003ULL * static_cast<std::uint64_t>(k)));
  std::normal_distribution<double> normal(0.0, 1.5);
  while (static_cast<int>(starts.size()) < std::max(opts.n_starts, 1) + static_cast<int>(seeds.size())) {
    std::vector<double> th(par.size());
    for (double& v : th) v = normal(rng);
    starts.push_back(std::move(th));
  }
  std::vector<NMResult> results(starts.size());
  detail::parallel_for(starts.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      NMResult r = nelder_mead(objective, starts[i], 0.7, opts.ftol, opts.max_evals);
      // restart from the incumbent until the value stops moving
      for (int rep = 0; rep < 3 && r.evals < opts.max_evals; ++rep) {
        NMResult again = nelder_mead(objective, r.x, 0.3, opts.ftol, opts.max_evals - r.evals);
        const int used = r.evals + again.evals;
        const bool moved = again.f < r.f - opts.ftol;
        if (again.f <= r.f) r = std::move(again);
        r.evals = used;
        if (!moved) break;
      }
      results[i] = std::move(r);
    }
  }, 1);
  std::size_t best = 0;
  int total = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    total += results[i].evals;
    if (results[i].f < results[best].f) best = i;
  }
  FixedKResult out;
  out.measure = par.decode(results[best].x);
  out.value = results[best].f;
  out.budget_exhausted = !results[best].converged && results[best].evals >= opts.max_evals;
  out.evaluations = total;
  return out;
}

AdaptiveResult minimize_adaptive(const Mixture& mix, const OptimizerOptions& opts) {
  if (opts.max_k < 0 || opts.max_k > 8) throw Error(ErrorCode::InvalidArgument, "max_k must lie in [0, 8]");
  const GridParams grid = objective_grid(mix, opts);
  AdaptiveResult res;
  FixedKResult cur = minimize_fixed_k(mix, 0, opts, {RSBMeasure::dirac(0.0)});
  res.trace.push_back({0, cur.value});
  res.budget_exhausted = cur.budget_exhausted;
  for (int k = 1; k <= opts.max_k; ++k) {
    // new atom where the first-order gain xi''(u)|Gamma(u) - u| is largest
    std::vector<double> us;
    for (int i = 1; i < 200; ++i) us.push_back(i / 200.0);
    const auto rep = gamma_report(mix, cur.measure, us);
    std::size_t arg = 0;
    double gain = -1.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
      const double g = mix.eval(us[i], 2) * std::abs(rep.gamma[i] - us[i]);
      if (g > gain) {
        gain = g;
        arg = i;
      }
    }
    auto atoms = cur.measure.support();
    std::vector<RSBMeasure> seeds;
    // incumbent padded with a negligible atom keeps the trace monotone
    seeds.push_back(RSBMeasure::from_atoms(resize_atoms(atoms, static_cast<std::size_t>(k + 1))));
    {
      auto split = atoms;
      auto it = std::min_element(split.begin(), split.end(), [&](const Atom& a, const Atom& b) {
        return std::abs(a.q - us[arg]) < std::abs(b.q - us[arg]);
      });
      const double half = 0.5 * it->mass;
      it->mass -= half;
      split.push_back({us[arg], half});
      seeds.push_back(RSBMeasure::from_atoms(resize_atoms(split, static_cast<std::size_t>(k + 1))));
    }
    OptimizerOptions o = opts;
    o.seed = opts.seed + static_cast<std::uint64_t>(k);
    FixedKResult next = minimize_fixed_k(mix, k, o, seeds);
    res.budget_exhausted = res.budget_exhausted || next.budget_exhausted;
    const double prev = cur.value;
    if (next.value < prev) {
      res.trace.push_back({k, next.value});
    } else {
      res.trace.push_back({k, prev});
    }
    if (prev - next.value < opts.improve_tol) break;
    cur = std::move(next);
  }
  res.measure = clean_measure(cur.measure);
  res.value = parisi_value(mix, res.measure, grid);
  return res;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::ConsistentMinimizer: return "ConsistentMinimizer";
    case Verdict::ViolatesGammaFixedPoint: return "ViolatesGammaFixedPoint";
    case Verdict::ViolatesGammaSlope: return "ViolatesGammaSlope";
    case Verdict::ViolatesOrigin: return "ViolatesOrigin";
    case Verdict::ViolatesMomentBound: return "ViolatesMomentBound";
  }
  return "Unknown";
}

Certificate certify(const Mixture& mix, const RSBMeasure& mu, double tol) {
  Certificate c;
  for (const auto& a : mu.support()) {
    if (a.mass > kMinMass) c.support_estimate.push_back(a);
  }
  std::vector<double> us;
  for (const auto& a : c.support_estimate) us.push_back(a.q);
  const auto rep = gamma_report(mix, mu, us);
  c.gamma_at_support = rep.gamma;
  c.gamma_prime_at_support = rep.gamma_prime;
  for (std::size_t i = 0; i < us.size(); ++i) {
    c.gamma_residual = std::max(c.gamma_residual, std::abs(rep.gamma[i] - us[i]));
    c.gamma_prime_max = std::max(c.gamma_prime_max, rep.gamma_prime[i]);
    if (us[i] <= kMergeDistance) {
      c.origin_in_support = true;
      c.origin_mass += c.support_estimate[i].mass;
    }
  }
  const double xi1 = mix.eval(1.0);
  for (const auto& a : mu.support()) c.moment_bound_lhs += a.mass * mix.eval(a.q) / xi1;
  c.moment_bound_rhs = 1.0 - std::sqrt(2.0 * std::log(2.0) / xi1);
  if (!c.origin_in_support) {
    c.verdict = Verdict::ViolatesOrigin;
  } else if (c.gamma_residual > tol) {
    c.verdict = Verdict::ViolatesGammaFixedPoint;
  } else if (c.gamma_prime_max > 1.0 + tol) {
    c.verdict = Verdict::ViolatesGammaSlope;
  } else if (c.moment_bound_lhs < c.moment_bound_rhs - tol) {
    c.verdict = Verdict::ViolatesMomentBound;
  } else {
    c.verdict = Verdict::ConsistentMinimizer;
  }
  return c;
}

}  // namespace parisi
