#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "parallel.hpp"
#include "parisi/error.hpp"
#include "parisi/parisi_pde.hpp"
#include "rng.hpp"

namespace parisi {
namespace {

using Poly = std::map<std::vector<int>, double>;

// F_j over (y_1..y_{j-1}, w); the last exponent belongs to w.
Poly next_polynomial(const Poly& f, int j) {
  Poly g;
  auto add = [&g](std::vector<int> e, double c) {
    if (c == 0.0) return;
    g[std::move(e)] += c;
  };
  for (const auto& [e, c] : f) {
    std::vector<int> base(e.begin(), e.end() - 1);
    base.push_back(0);  // new y_j
    base.push_back(e.back());
    const auto nv = static_cast<std::size_t>(j);  // index of w in the new vector
    for (int i = 1; i <= j - 1; ++i) {
      const auto yi = static_cast<std::size_t>(i - 1);
      if (e[yi] == 0) continue;
      auto t = base;
      t[yi] -= 1;
      t[yi + 1] += 1;
      add(t, c * e[yi]);
    }
    if (e.back() > 0) {
      auto t = base;
      t[nv] -= 1;
      add(t, c * e.back());
      t[nv] += 2;
      add(t, -c * e.back());
    }
    auto t = base;
    t[0] += 1;
    add(t, c);
  }
  std::erase_if(g, [](const auto& kv) { return kv.second == 0.0; });
  return g;
}

}  // namespace

std::vector<std::pair<std::vector<int>, double>> derivative_polynomial(int j) {
  if (j < 1 || j > 12) throw Error(ErrorCode::InvalidArgument, "F_j order " + std::to_string(j));
  Poly f{{{1}, 1.0}};
  for (int i = 1; i < j; ++i) f = next_polynomial(f, i);
  return {f.begin(), f.end()};
}

double eval_derivative_polynomial(int j, const std::vector<double>& y, double w) {
  static const auto table = [] {
    std::vector<std::vector<std::pair<std::vector<int>, double>>> t;
    for (int i = 1; i <= 6; ++i) t.push_back(derivative_polynomial(i));
    return t;
  }();
  const auto terms = j <= 6 ? table[static_cast<std::size_t>(j - 1)] : derivative_polynomial(j);
  if (y.size() + 1 < static_cast<std::size_t>(j)) {
    throw Error(ErrorCode::InvalidArgument, "F_j needs j-1 derivative arguments");
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms) {
    double v = c;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) v *= std::pow(y[i], e[i]);
    v *= std::pow(w, e.back());
    sum += v;
  }
  return sum;
}

MonteCarloEstimate mc_derivative_oracle(const PDESolution& s, double x, double u, int j,
                                        std::size_t n_paths, std::uint64_t seed) {
  if (j < 1 || j > 3) throw Error(ErrorCode::InvalidArgument, "j must be 1, 2 or 3");
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::DomainError, "u outside [0,1]");
  if (n_paths < 2) throw Error(ErrorCode::InvalidArgument, "need at least two paths");
  const auto& mix = s.mixture();
  const auto atoms = s.measure().support();

  std::vector<double> times{u, 1.0};
  for (const auto& a : atoms) times.push_back(std::max(u, a.q));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<Slice> slices;
  for (double t : times) slices.push_back(s.exact_slice(t));
  std::vector<double> sd(times.size(), 0.0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    sd[i] = std::sqrt(std::max(0.0, mix.eval(times[i], 1) - mix.eval(times[i - 1], 1)));
  }
  std::vector<std::size_t> atom_time;
  for (const auto& a : atoms) {
    const double t = std::max(u, a.q);
    atom_time.push_back(static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin()));
  }
  const std::size_t top = times.size() - 1;

  constexpr double h = 0.05;
  const std::size_t chunks = detail::kMonteCarloChunks;
  std::vector<double> sum(chunks, 0.0), sum2(chunks, 0.0);
  detail::parallel_for(chunks, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> dm(times.size());
    double out[4];
    for (std::size_t c = lo; c < hi; ++c) {
      std::mt19937_64 rng(detail::splitmix64(seed + c));
      std::normal_distribution<double> normal;
      const std::size_t n = n_paths / chunks + (c < n_paths % chunks ? 1 : 0);
      for (std::size_t p = 0; p < n; ++p) {
        dm[0] = 0.0;
        for (std::size_t i = 1; i < times.size(); ++i) dm[i] = dm[i - 1] + sd[i] * normal(rng);
        auto V = [&](double xx) {
          double v = 0.0;
          s.sample(slices[top], xx + dm[top], out);
          const double end = out[0];
          for (std::size_t a = 0; a < atoms.size(); ++a) {
            s.sample(slices[atom_time[a]], xx + dm[atom_time[a]], out);
            v += atoms[a].mass * (end - out[0]);
          }
          return v;
        };
        const double v0 = V(x);
        std::vector<double> y;
        if (j >= 2) {
          const double vp1 = V(x + h), vm1 = V(x - h), vp2 = V(x + 2 * h), vm2 = V(x - 2 * h);
          y.push_back((-vp2 + 8 * vp1 - 8 * vm1 + vm2) / (12 * h));
          if (j >= 3) y.push_back((-vp2 + 16 * vp1 - 30 * v0 + 16 * vm1 - vm2) / (12 * h * h));
        }
        const double w = std::tanh(x + dm[top]);
        const double val = eval_derivative_polynomial(j, y, w) * std::exp(v0);
        sum[c] += val;
        sum2[c] += val * val;
      }
    }
  }, 1);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    s1 += sum[c];
    s2 += sum2[c];
  }
  const double n = static_cast<double>(n_paths);
  const double mean = s1 / n;
  const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

}  // namespace parisi
