#include "parisi/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parisi/error.hpp"
#include "parisi/quadrature.hpp"

namespace parisi {
namespace {

constexpr double kOneTol = 1e-13;

std::vector<double> piece_cuts(const PiecewiseCdf& pc, double lo, double hi) {
  std::vector<double> cuts{lo, hi};
  for (const auto& p : pc.pieces()) {
    if (p.start > lo && p.start < hi) cuts.push_back(p.start);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

// Smallest q with x_mu(q) = 1, or 1 when x_mu < 1 on [0, 1).
double q_hat(const PiecewiseCdf& pc) {
  for (const auto& p : pc.pieces()) {
    if (p.c0 >= 1.0 - kOneTol) return p.start;
    const double l = p.end - p.start;
    if (p.end < 1.0 && p.c0 + p.c1 * l + p.c2 * l * l >= 1.0 - kOneTol) return p.end;
  }
  return 1.0;
}

double support_top(const GeneralMeasure& mu) {
  double top = 0.0;
  for (const auto& a : mu.atoms()) top = std::max(top, a.q);
  for (const auto& s : mu.segments()) {
    const double h = (s.b - s.a) / static_cast<double>(s.values.size() - 1);
    for (std::size_t i = s.values.size(); i-- > 0;) {
      if (s.values[i] > 0.0) {
        top = std::max(top, std::min(s.b, s.a + h * static_cast<double>(i + 1)));
        break;
      }
    }
  }
  return top;
}

double density_at(const DensitySegment& s, double u) {
  if (u < s.a || u > s.b) return 0.0;
  const double h = (s.b - s.a) / static_cast<double>(s.values.size() - 1);
  const double t = (u - s.a) / h;
  auto i = static_cast<std::size_t>(std::floor(t));
  if (i + 1 >= s.values.size()) return s.values.back();
  const double w = t - static_cast<double>(i);
  return (1.0 - w) * s.values[i] + w * s.values[i + 1];
}

}  // namespace

double cs_value(const Mixture& mix, const GeneralMeasure& mu) {
  const PiecewiseCdf pc(mu);
  const double qh = q_hat(pc);
  if (qh >= 1.0) return kInfiniteValue;
  double a = 0.0;
  for (const auto& p : pc.pieces()) {
    a += integrate([&](double u) { return pc.eval(std::min(u, p.end)) * mix.eval(u, 1); }, p.start, p.end);
  }
  // x is 1 past qhat, so the remaining mass sits at or below it
  double b = 0.0;
  const auto cuts = piece_cuts(pc, 0.0, qh);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    b += integrate([&](double u) { return 1.0 / pc.tail_integral(u); }, cuts[i], cuts[i + 1]);
  }
  return 0.5 * (a + b + std::log1p(-qh));
}

SphericalReport f_F_curves(const Mixture& mix, const GeneralMeasure& mu, const std::vector<double>& q_grid) {
  if (q_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty q grid");
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    if (q_grid[i] < 0.0 || q_grid[i] >= 1.0 || (i > 0 && !(q_grid[i] > q_grid[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "q grid must increase inside [0, 1)");
    }
  }
  const PiecewiseCdf pc(mu);
  SphericalReport r;
  r.q_grid = q_grid;
  double A = 0.0, B = 0.0, prev = 0.0;
  auto xhat = [&](double u) {
    const double v = pc.tail_integral(u);
    if (!(v > 0.0)) {
      throw Error(ErrorCode::DegenerateTail, "xhat vanishes at q=" + std::to_string(u));
    }
    return v;
  };
  for (double q : q_grid) {
    if (q > prev) {
      xhat(q);
      const auto cuts = piece_cuts(pc, prev, q);
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        A += integrate([&](double s) { const double h = xhat(s); return 1.0 / (h * h); }, cuts[i], cuts[i + 1]);
        B += integrate([&](double s) { const double h = xhat(s); return s / (h * h); }, cuts[i], cuts[i + 1]);
      }
      prev = q;
    } else {
      xhat(q);
    }
    r.x_curve.push_back(pc.eval(q));
    r.F_curve.push_back(mix.eval(q, 1) - A);
    r.f_curve.push_back(mix.eval(q, 0) - q * A + B);
  }
  r.max_f = *std::max_element(r.f_curve.begin(), r.f_curve.end());
  r.q_M = support_top(mu);
  return r;
}

SphericalReport spherical_certify(const Mixture& mix, const GeneralMeasure& mu, double tol) {
  constexpr int kGrid = 4001;
  std::vector<double> grid;
  for (int i = 0; i < kGrid; ++i) grid.push_back(kSphericalQ1 * i / (kGrid - 1));
  for (const auto& a : mu.atoms()) {
    if (a.q <= kSphericalQ1) grid.push_back(a.q);
  }
  for (const auto& s : mu.segments()) {
    for (double u : {s.a, s.b}) {
      if (u <= kSphericalQ1) grid.push_back(u);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }),
             grid.end());
  SphericalReport r = f_F_curves(mix, mu, grid);
  const double tol_f = 1e-8 * (1.0 + std::abs(r.max_f));
  for (std::size_t i = 0; i < grid.size();) {
    if (r.f_curve[i] < r.max_f - tol_f) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < grid.size() && r.f_curve[j + 1] >= r.max_f - tol_f) ++j;
    r.S_intervals.push_back({grid[i], grid[j]});
    i = j + 1;
  }
  double mass = 0.0;
  for (const auto& iv : r.S_intervals) mass += mu.cdf(iv.b) - mu.cdf_left(iv.a);
  r.mass_on_S = std::clamp(mass, 0.0, 1.0);
  r.verdict = r.mass_on_S >= 1.0 - tol;
  return r;
}

double frsb_density(const Mixture& mix, double u) {
  const double x2 = mix.eval(u, 2);
  if (x2 == 0.0) throw Error(ErrorCode::SingularMixture, "xi''(u) = 0 at u=" + std::to_string(u));
  const double v = mix.eval(u, 3) / (2.0 * std::pow(x2, 1.5));
  if (v < 0.0 || v > 1.0) {
    throw Error(ErrorCode::RangeViolation, "FRSB distribution value " + std::to_string(v) + " outside [0,1]");
  }
  return v;
}

double frsb_density_derivative(const Mixture& mix, double u) {
  const double x2 = mix.eval(u, 2);
  if (x2 == 0.0) throw Error(ErrorCode::SingularMixture, "xi''(u) = 0 at u=" + std::to_string(u));
  const double x3 = mix.eval(u, 3);
  return mix.eval(u, 4) / (2.0 * std::pow(x2, 1.5)) - 0.75 * x3 * x3 / std::pow(x2, 2.5);
}

TwoPlusPSolution solve_two_plus_p(double beta_sq, double t, int p, int density_nodes) {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::InvalidArgument, "t must lie in (0, 1)");
  if (p < 4) throw Error(ErrorCode::InvalidArgument, "p must be >= 4");
  if (!(beta_sq > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta_sq must be positive");
  if (density_nodes < 2) throw Error(ErrorCode::InvalidArgument, "need at least two density nodes");
  const Mixture mix = Mixture::validate({{2, beta_sq * (1.0 - t)}, {p, beta_sq * t}});
  const double dp = p;
  const bool applicable = t / (1.0 - t) <= 4.0 * (dp - 3.0) / ((dp - 1.0) * dp * dp) &&
                          beta_sq > 1.0 / (2.0 * (1.0 - t));
  auto h = [&](double q) { return (1.0 - q) * (1.0 - q) * mix.eval(q, 2) - 1.0; };
  if (h(0.0) <= 0.0) {
    return {mix, GeneralMeasure::from_rsb(RSBMeasure::dirac(0.0)), 0.0, applicable};
  }
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  const double qm = 0.5 * (lo + hi);
  DensitySegment seg{0.0, qm, {}};
  const double step = qm / (density_nodes - 1);
  for (int i = 0; i < density_nodes; ++i) {
    const double u = i == density_nodes - 1 ? qm : step * i;
    seg.values.push_back(std::max(0.0, frsb_density_derivative(mix, u)));
  }
  double dens = 0.0;
  for (std::size_t i = 0; i + 1 < seg.values.size(); ++i) dens += 0.5 * step * (seg.values[i] + seg.values[i + 1]);
  const double at0 = std::clamp(mix.eval(0.0, 3) / (2.0 * std::pow(mix.eval(0.0, 2), 1.5)), 0.0, 1.0);
  if (at0 + dens > 1.0) {
    const double scale = (1.0 - at0) / dens;
    for (double& v : seg.values) v *= scale;
    dens = 1.0 - at0;
  }
  std::vector<Atom> atoms;
  if (at0 > 0.0) atoms.push_back({0.0, at0});
  const double top = 1.0 - at0 - dens;
  if (top > 0.0) atoms.push_back({qm, top});
  return {mix, GeneralMeasure::make(std::move(atoms), {std::move(seg)}), qm, applicable};
}

StructureReport spherical_structure_checks(const Mixture& mix, const GeneralMeasure& mu) {
  StructureReport r;
  r.xi2_at_origin = mix.eval(0.0, 2);
  bool atom0 = false;
  for (const auto& a : mu.atoms()) atom0 = atom0 || a.q <= kAtomMergeTol;
  for (const auto& s : mu.segments()) {
    if (s.a <= kAtomMergeTol && s.values.size() >= 2 && (s.values[0] > 0.0 || s.values[1] > 0.0)) {
      r.origin_accumulates = true;
    }
  }
  r.origin_in_support = atom0 || r.origin_accumulates;
  if (r.origin_in_support && !r.origin_accumulates) {
    double next = 1.0;
    bool found = false;
    for (const auto& a : mu.atoms()) {
      if (a.q > kAtomMergeTol) {
        next = std::min(next, a.q);
        found = true;
      }
    }
    for (const auto& s : mu.segments()) {
      const double h = (s.b - s.a) / static_cast<double>(s.values.size() - 1);
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (s.values[i] > 0.0) {
          next = std::min(next, std::max(s.a, s.a + h * (static_cast<double>(i) - 1.0)));
          found = true;
          break;
        }
      }
    }
    if (found) r.gap_above_origin = next;
  }
  for (const auto& a : mu.atoms()) {
    for (const auto& s : mu.segments()) {
      if (a.q > s.a && a.q < s.b) {
        const double eps = 1e-9 * (s.b - s.a);
        if (density_at(s, a.q - eps) > 0.0 && density_at(s, a.q + eps) > 0.0) {
          r.interior_atoms.push_back(a);
          r.max_interior_atom_mass = std::max(r.max_interior_atom_mass, a.mass);
        }
      }
    }
  }
  return r;
}

}  // namespace parisi
