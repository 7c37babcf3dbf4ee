#include "parisi/parisi_pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "parisi/error.hpp"
#include "parisi/quadrature.hpp"
#include "pde_kernel.hpp"

namespace parisi {

GridParams GridParams::defaults(const Mixture& mix) {
  GridParams g;
  g.x_max = 6.0 * std::sqrt(mix.eval(1.0, 1)) + 8.0;
  return g;
}

void GridParams::validate(const Mixture& mix) const {
  const double need = 6.0 * std::sqrt(mix.eval(1.0, 1)) + 8.0;
  if (n_x < 256 || n_x % 2 == 0) {
    throw Error(ErrorCode::GridTooSmall, "n_x must be odd and >= 256, got " + std::to_string(n_x));
  }
  if (quad_order < 20) {
    throw Error(ErrorCode::GridTooSmall, "quad_order must be >= 20, got " + std::to_string(quad_order));
  }
  if (n_u < 0) throw Error(ErrorCode::GridTooSmall, "n_u must be >= 0");
  if (!(x_max >= need * (1.0 - 1e-12))) {
    throw Error(ErrorCode::GridTooSmall,
                "x_max " + std::to_string(x_max) + " below " + std::to_string(need));
  }
}

const std::vector<double>& Slice::derivative(int j) const {
  switch (j) {
    case 0: return phi;
    case 1: return d1;
    case 2: return d2;
    case 3: return d3;
  }
  throw Error(ErrorCode::InvalidArgument, "derivative order " + std::to_string(j));
}

LevelStructure LevelStructure::from(const RSBMeasure& mu) {
  auto atoms = mu.support();
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.q < b.q; });
  if (atoms.front().q > 0.0) atoms.insert(atoms.begin(), Atom{0.0, 0.0});
  LevelStructure lv;
  double cum = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    lv.breaks.push_back(atoms[i].q);
    cum += atoms[i].mass;
    if (i + 1 < atoms.size()) lv.x_values.push_back(std::min(cum, 1.0));
  }
  return lv;
}

std::size_t LevelStructure::level_of(double u) const {
  auto it = std::upper_bound(breaks.begin(), breaks.end(), u);
  if (it == breaks.begin()) return 0;
  return static_cast<std::size_t>(it - breaks.begin()) - 1;
}

double LevelStructure::x_at(double u) const {
  const std::size_t i = level_of(u);
  return i < x_values.size() ? x_values[i] : 1.0;
}

namespace detail {

void analytic_point(double y, double offset, double out[4]) {
  const double a = std::abs(y);
  const double e = std::exp(-2.0 * a);
  const double th = std::copysign((1.0 - e) / (1.0 + e), y);
  const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
  out[0] = a + std::log1p(e) - std::log(2.0) + offset;
  out[1] = th;
  out[2] = sech2;
  out[3] = -2.0 * sech2 * th;
}

void GridView::sample(const Slice& s, double y, double out[4], bool derivs) const {
  const std::size_t n = s.phi.size();
  const double a = std::abs(y);
  if (a > x_max) {
    const double sign = y < 0.0 ? -1.0 : 1.0;
    const double decay = std::exp(-2.0 * (a - x_max));
    out[0] = s.phi[n - 1] + (a - x_max) + std::log1p(std::exp(-2.0 * a)) -
             std::log1p(std::exp(-2.0 * x_max));
    if (derivs) {
      out[1] = sign * (1.0 - (1.0 - std::abs(s.d1[n - 1])) * decay);
      out[2] = s.d2[n - 1] * decay;
      out[3] = sign * s.d3[n - 1] * decay;
    }
    return;
  }
  const double t = (y + x_max) / dx;
  auto j = static_cast<std::ptrdiff_t>(std::floor(t));
  j = std::clamp<std::ptrdiff_t>(j, 1, static_cast<std::ptrdiff_t>(n) - 3);
  const double th = t - static_cast<double>(j);
  const double w0 = -th * (th - 1.0) * (th - 2.0) / 6.0;
  const double w1 = (th + 1.0) * (th - 1.0) * (th - 2.0) / 2.0;
  const double w2 = -(th + 1.0) * th * (th - 2.0) / 2.0;
  const double w3 = (th + 1.0) * th * (th - 1.0) / 6.0;
  const auto k = static_cast<std::size_t>(j - 1);
  auto interp = [&](const std::vector<double>& v) {
    return w0 * v[k] + w1 * v[k + 1] + w2 * v[k + 2] + w3 * v[k + 3];
  };
  out[0] = interp(s.phi);
  if (derivs) {
    out[1] = interp(s.d1);
    out[2] = interp(s.d2);
    out[3] = interp(s.d3);
  }
}

void fill_analytic(Slice& s, const std::vector<double>& x, double offset) {
  const std::size_t n = x.size();
  s.phi.resize(n);
  s.d1.resize(n);
  s.d2.resize(n);
  s.d3.resize(n);
  double v[4];
  for (std::size_t i = 0; i < n; ++i) {
    analytic_point(x[i], offset, v);
    s.phi[i] = v[0];
    s.d1[i] = v[1];
    s.d2[i] = v[2];
    s.d3[i] = v[3];
  }
}

// One Cole-Hopf step: Phi(x) = (1/m) log E exp(m top(x + sigma z)), with the
// derivative identities of the tilted Gaussian average.
void cole_hopf_point(const Source& top, const GridView& view, const GaussHermite& gh, double m,
                     double sigma, double x, bool derivs, double out[4]) {
  const std::size_t Q = gh.size();
  double buf[4];
  // Small stack buffers cover every practical order; larger orders fall back to heap.
  constexpr std::size_t kStack = 256;
  double phi_s[kStack], d1_s[kStack], d2_s[kStack], d3_s[kStack];
  std::vector<double> heap;
  double *phi = phi_s, *g1 = d1_s, *g2 = d2_s, *g3 = d3_s;
  if (Q > kStack) {
    heap.resize(4 * Q);
    phi = heap.data();
    g1 = phi + Q;
    g2 = g1 + Q;
    g3 = g2 + Q;
  }
  double vmax = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < Q; ++l) {
    const double y = x + sigma * gh.nodes[l];
    if (top.slice) {
      view.sample(*top.slice, y, buf, derivs);
    } else {
      analytic_point(y, top.offset, buf);
    }
    phi[l] = buf[0];
    if (derivs) {
      g1[l] = buf[1];
      g2[l] = buf[2];
      g3[l] = buf[3];
    }
    vmax = std::max(vmax, buf[0]);
  }
  if (m == 0.0) {
    double e0 = 0.0, e1 = 0.0, e2 = 0.0, e3 = 0.0;
    for (std::size_t l = 0; l < Q; ++l) {
      const double w = gh.weights[l];
      e0 += w * phi[l];
      if (derivs) {
        e1 += w * g1[l];
        e2 += w * g2[l];
        e3 += w * g3[l];
      }
    }
    out[0] = e0;
    if (derivs) {
      out[1] = e1;
      out[2] = e2;
      out[3] = e3;
    }
    return;
  }
  // log-space with max subtraction; expm1 keeps tiny m accurate.
  double s1 = 0.0;
  for (std::size_t l = 0; l < Q; ++l) {
    const double t = std::expm1(m * (phi[l] - vmax));
    phi[l] = t;  // reuse as tilt - 1
    s1 += gh.weights[l] * t;
  }
  const double total = 1.0 + s1;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::QuadratureUnderflow, "Cole-Hopf normalizer underflow at x=" + std::to_string(x));
  }
  out[0] = vmax + std::log1p(s1) / m;
  if (!std::isfinite(out[0])) {
    throw Error(ErrorCode::QuadratureUnderflow, "non-finite Cole-Hopf value at x=" + std::to_string(x));
  }
  if (!derivs) return;
  double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0;
  for (std::size_t l = 0; l < Q; ++l) {
    const double p = gh.weights[l] * (1.0 + phi[l]) / total;
    mu1 += p * g1[l];
    mu2 += p * g2[l];
    mu3 += p * g3[l];
  }
  double var = 0.0, cov = 0.0, c3 = 0.0;
  for (std::size_t l = 0; l < Q; ++l) {
    const double p = gh.weights[l] * (1.0 + phi[l]) / total;
    const double c = g1[l] - mu1;
    var += p * c * c;
    cov += p * c * (g2[l] - mu2);
    c3 += p * c * c * c;
  }
  out[1] = mu1;
  out[2] = mu2 + m * var;
  out[3] = mu3 + 3.0 * m * cov + m * m * c3;
}

Slice cole_hopf_slice(const Source& top, const GridView& view, const std::vector<double>& x,
                      const GaussHermite& gh, double m, double var, double u, bool derivs) {
  const std::size_t n = x.size();
  const std::size_t c = n / 2;
  Slice s;
  s.u = u;
  s.phi.assign(n, 0.0);
  if (derivs) {
    s.d1.assign(n, 0.0);
    s.d2.assign(n, 0.0);
    s.d3.assign(n, 0.0);
  }
  const double sigma = std::sqrt(std::max(var, 0.0));
  parallel_for(n - c, [&](std::size_t lo, std::size_t hi) {
    double out[4];
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t i = c + k;
      cole_hopf_point(top, view, gh, m, sigma, x[i], derivs, out);
      s.phi[i] = out[0];
      if (derivs) {
        s.d1[i] = out[1];
        s.d2[i] = out[2];
        s.d3[i] = out[3];
      }
    }
  });
  for (std::size_t k = 1; k <= c; ++k) {
    s.phi[c - k] = s.phi[c + k];
    if (derivs) {
      s.d1[c - k] = -s.d1[c + k];
      s.d2[c - k] = s.d2[c + k];
      s.d3[c - k] = -s.d3[c + k];
    }
  }
  if (derivs) {
    s.d1[c] = 0.0;
    s.d3[c] = 0.0;
    if (1.0 - std::abs(s.d1[n - 1]) > 1e-6) {
      throw Error(ErrorCode::GridTooSmall,
                  "boundary slope " + std::to_string(s.d1[n - 1]) + " at u=" + std::to_string(u));
    }
  }
  return s;
}

}  // namespace detail

PDESolution::PDESolution(Mixture mix, RSBMeasure mu, GridParams grid)
    : mixture_(std::move(mix)), measure_(std::move(mu)), grid_(grid) {
  grid_.validate(mixture_);
  levels_ = LevelStructure::from(measure_);
  const auto n = static_cast<std::size_t>(grid_.n_x);
  x_.resize(n);
  dx_ = 2.0 * grid_.x_max / static_cast<double>(n - 1);
  const std::size_t c = n / 2;
  for (std::size_t i = 0; i < n; ++i) {
    x_[i] = (static_cast<double>(i) - static_cast<double>(c)) * dx_;
  }
  x_[0] = -grid_.x_max;
  x_[n - 1] = grid_.x_max;
}

void PDESolution::build_levels(bool with_derivatives) {
  const std::size_t L = levels_.x_values.size();
  const auto& gh = gauss_hermite(grid_.quad_order);
  const detail::GridView view{grid_.x_max, dx_};
  level_slices_.assign(L + 1, Slice{});
  Slice& top = level_slices_[L];
  top.u = levels_.breaks[L];
  detail::fill_analytic(top, x_, 0.5 * (mixture_.eval(1.0, 1) - mixture_.eval(top.u, 1)));
  for (std::size_t i = L; i-- > 0;) {
    detail::Source src;
    if (i + 1 == L) {
      src.offset = 0.5 * (mixture_.eval(1.0, 1) - mixture_.eval(levels_.breaks[L], 1));
    } else {
      src.slice = &level_slices_[i + 1];
    }
    const double var = mixture_.eval(levels_.breaks[i + 1], 1) - mixture_.eval(levels_.breaks[i], 1);
    level_slices_[i] = detail::cole_hopf_slice(src, view, x_, gh, levels_.x_values[i], var,
                                               levels_.breaks[i], with_derivatives);
  }
}

Slice PDESolution::exact_slice(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::DomainError, "u outside [0,1]");
  const std::size_t L = levels_.x_values.size();
  const std::size_t i = levels_.level_of(u);
  if (i >= L) {
    Slice s;
    s.u = u;
    detail::fill_analytic(s, x_, 0.5 * (mixture_.eval(1.0, 1) - mixture_.eval(u, 1)));
    return s;
  }
  if (u == levels_.breaks[i]) {
    Slice s = level_slices_[i];
    s.u = u;
    return s;
  }
  detail::Source src;
  if (i + 1 == L) {
    src.offset = 0.5 * (mixture_.eval(1.0, 1) - mixture_.eval(levels_.breaks[L], 1));
  } else {
    src.slice = &level_slices_[i + 1];
  }
  const double var = mixture_.eval(levels_.breaks[i + 1], 1) - mixture_.eval(u, 1);
  return detail::cole_hopf_slice(src, detail::GridView{grid_.x_max, dx_}, x_,
                                 gauss_hermite(grid_.quad_order), levels_.x_values[i], var, u, true);
}

double PDESolution::value(int j, std::size_t iu, std::size_t ix) const {
  return slices_.at(iu).derivative(j).at(ix);
}

void PDESolution::sample(const Slice& s, double x, double out[4]) const {
  detail::GridView{grid_.x_max, dx_}.sample(s, x, out, true);
}

double PDESolution::eval(double x, double u, int j) const {
  if (j < 0 || j > 3) throw Error(ErrorCode::InvalidArgument, "derivative order " + std::to_string(j));
  if (!(std::abs(x) <= grid_.x_max)) throw Error(ErrorCode::DomainError, "|x| > x_max");
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::DomainError, "u outside [0,1]");
  auto it = std::lower_bound(u_.begin(), u_.end(), u);
  double a[4], b[4];
  if (it != u_.end() && *it == u) {
    sample(slices_[static_cast<std::size_t>(it - u_.begin())], x, a);
    return a[j];
  }
  if (it == u_.begin() || it == u_.end()) {
    // n_u == 0 leaves only level points; fall back to an exact slice.
    const Slice s = exact_slice(u);
    sample(s, x, a);
    return a[j];
  }
  const auto hi = static_cast<std::size_t>(it - u_.begin());
  const std::size_t lo = hi - 1;
  sample(slices_[lo], x, a);
  sample(slices_[hi], x, b);
  const double w = (u - u_[lo]) / (u_[hi] - u_[lo]);
  return (1.0 - w) * a[j] + w * b[j];
}

double eval_phi(const PDESolution& s, double x, double u, int j) { return s.eval(x, u, j); }

PDESolution solve_pde(const Mixture& mix, const RSBMeasure& mu, const GridParams& grid) {
  PDESolution sol(mix, mu, grid);
  sol.build_levels(true);
  std::vector<double> us;
  if (grid.n_u >= 2) {
    for (int i = 0; i < grid.n_u; ++i) us.push_back(static_cast<double>(i) / (grid.n_u - 1));
  }
  us.push_back(0.0);
  us.push_back(1.0);
  for (int p = 1; p <= mu.k() + 1; ++p) us.push_back(mu.q()[static_cast<std::size_t>(p)]);
  std::sort(us.begin(), us.end());
  std::vector<double> uniq;
  for (double u : us) {
    if (uniq.empty() || u - uniq.back() > 1e-14) uniq.push_back(u);
  }
  sol.u_ = std::move(uniq);
  sol.slices_.reserve(sol.u_.size());
  for (double u : sol.u_) sol.slices_.push_back(sol.exact_slice(u));
  return sol;
}

double phi_at_origin(const Mixture& mix, const RSBMeasure& mu, const GridParams& grid) {
  grid.validate(mix);
  const auto lv = LevelStructure::from(mu);
  const std::size_t L = lv.x_values.size();
  const double xi1 = mix.eval(1.0, 1);
  if (L == 0) return 0.5 * xi1;
  const auto n = static_cast<std::size_t>(grid.n_x);
  const double dx = 2.0 * grid.x_max / static_cast<double>(n - 1);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (static_cast<double>(i) - static_cast<double>(n / 2)) * dx;
  }
  x[0] = -grid.x_max;
  x[n - 1] = grid.x_max;
  const auto& gh = gauss_hermite(grid.quad_order);
  const detail::GridView view{grid.x_max, dx};
  detail::Source src;
  src.offset = 0.5 * (xi1 - mix.eval(lv.breaks[L], 1));
  Slice cur;
  for (std::size_t i = L; i-- > 1;) {
    const double var = mix.eval(lv.breaks[i + 1], 1) - mix.eval(lv.breaks[i], 1);
    Slice next = detail::cole_hopf_slice(src, view, x, gh, lv.x_values[i], var, lv.breaks[i], false);
    cur = std::move(next);
    src.slice = &cur;
  }
  const double var = mix.eval(lv.breaks[1], 1) - mix.eval(lv.breaks[0], 1);
  double out[4];
  detail::cole_hopf_point(src, view, gh, lv.x_values[0], std::sqrt(std::max(var, 0.0)), 0.0, false,
                          out);
  return out[0];
}

}  // namespace parisi
