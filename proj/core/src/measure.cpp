#include "parisi/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parisi/error.hpp"

namespace parisi {
namespace {

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::vector<Atom> sort_and_merge(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.q < b.q; });
  std::vector<Atom> out;
  for (const Atom& a : atoms) {
    if (!out.empty() && a.q - out.back().q < kAtomMergeTol) {
      out.back().mass += a.mass;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

double segment_mass(const DensitySegment& s) {
  const std::size_t n = s.values.size();
  const double h = (s.b - s.a) / static_cast<double>(n - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) sum += 0.5 * h * (s.values[i] + s.values[i + 1]);
  return sum;
}

// One linear piece of density r0 + r1 * (t - start) on [start, end).
struct DensityPiece {
  double start;
  double end;
  double r0;
  double r1;
};

std::vector<DensityPiece> density_pieces(const std::vector<DensitySegment>& segments) {
  std::vector<DensityPiece> out;
  for (const auto& s : segments) {
    const std::size_t n = s.values.size();
    const double h = (s.b - s.a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double lo = s.a + h * static_cast<double>(i);
      const double hi = (i + 2 == n) ? s.b : s.a + h * static_cast<double>(i + 1);
      out.push_back({lo, hi, s.values[i], (s.values[i + 1] - s.values[i]) / h});
    }
  }
  return out;
}

// Integral of |A + B t + C t^2| over [0, L].
double abs_quadratic_integral(double A, double B, double C, double L) {
  auto prim = [&](double t) { return A * t + 0.5 * B * t * t + C * t * t * t / 3.0; };
  std::vector<double> cuts{0.0};
  const double scale = std::abs(A) + std::abs(B) * L + std::abs(C) * L * L;
  if (scale == 0.0) return 0.0;
  if (std::abs(C) * L * L > 1e-15 * scale) {
    const double disc = B * B - 4.0 * A * C;
    if (disc > 0.0) {
      const double sq = std::sqrt(disc);
      const double qq = -0.5 * (B + std::copysign(sq, B));
      const double r1 = qq / C;
      const double r2 = qq != 0.0 ? A / qq : r1;
      for (double r : {r1, r2}) {
        if (r > 0.0 && r < L) cuts.push_back(r);
      }
    }
  } else if (std::abs(B) * L > 1e-15 * scale) {
    const double r = -A / B;
    if (r > 0.0 && r < L) cuts.push_back(r);
  }
  cuts.push_back(L);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += std::abs(prim(cuts[i + 1]) - prim(cuts[i]));
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------- RSBMeasure

RSBMeasure RSBMeasure::make(int k, std::vector<double> m, std::vector<double> q) {
  if (k < 0) throw Error(ErrorCode::RangeViolation, "k must be nonnegative");
  const auto ku = static_cast<std::size_t>(k);
  if (m.size() != ku + 2 || q.size() != ku + 3) {
    throw Error(ErrorCode::RangeViolation, "triplet needs k+2 masses and k+3 locations");
  }
  for (double v : m) {
    if (!in_unit(v)) throw Error(ErrorCode::RangeViolation, "m_p outside [0,1]");
  }
  for (double v : q) {
    if (!in_unit(v)) throw Error(ErrorCode::RangeViolation, "q_p outside [0,1]");
  }
  // m_0 <= m_1 < ... < m_k <= m_{k+1}; same pattern for q up to q_{k+2}.
  for (std::size_t p = 0; p + 1 < m.size(); ++p) {
    const bool strict = p >= 1 && p + 1 <= ku;
    if (strict ? !(m[p] < m[p + 1]) : !(m[p] <= m[p + 1])) {
      throw Error(ErrorCode::OrderingViolation, "m not increasing at p = " + std::to_string(p));
    }
  }
  for (std::size_t p = 0; p + 1 < q.size(); ++p) {
    const bool strict = p >= 1 && p <= ku;
    if (strict ? !(q[p] < q[p + 1]) : !(q[p] <= q[p + 1])) {
      throw Error(ErrorCode::OrderingViolation, "q not increasing at p = " + std::to_string(p));
    }
  }
  if (m.front() != 0.0 || m.back() != 1.0 || q.front() != 0.0 || q.back() != 1.0) {
    throw Error(ErrorCode::RangeViolation, "need m_0 = 0, m_{k+1} = 1, q_0 = 0, q_{k+2} = 1");
  }
  // Merge levels whose locations are numerically indistinguishable.
  for (std::size_t p = 1; p + 1 < q.size() - 1;) {
    if (q[p + 1] - q[p] < kAtomMergeTol) {
      m.erase(m.begin() + static_cast<std::ptrdiff_t>(p));
      q.erase(q.begin() + static_cast<std::ptrdiff_t>(p + 1));
      --k;
    } else {
      ++p;
    }
  }
  return RSBMeasure(k, std::move(m), std::move(q));
}

RSBMeasure RSBMeasure::from_atoms(std::vector<Atom> atoms) {
  double total = 0.0;
  std::vector<Atom> kept;
  for (const Atom& a : atoms) {
    if (!in_unit(a.q) || !std::isfinite(a.mass) || a.mass < 0.0) {
      throw Error(ErrorCode::RangeViolation, "atom outside [0,1] or with negative mass");
    }
    total += a.mass;
    if (a.mass > 0.0) kept.push_back(a);
  }
  if (kept.empty() || std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::RangeViolation, "atom masses must sum to 1, got " + std::to_string(total));
  }
  kept = sort_and_merge(std::move(kept));
  const int k = static_cast<int>(kept.size()) - 1;
  std::vector<double> m{0.0};
  std::vector<double> q{0.0};
  double acc = 0.0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    acc += kept[i].mass;
    m.push_back(i + 1 == kept.size() ? 1.0 : std::min(acc, 1.0));
    q.push_back(kept[i].q);
  }
  q.push_back(1.0);
  return RSBMeasure(k, std::move(m), std::move(q));
}

RSBMeasure RSBMeasure::dirac(double q) {
  if (!in_unit(q)) throw Error(ErrorCode::RangeViolation, "dirac location outside [0,1]");
  return make(0, {0.0, 1.0}, {0.0, q, 1.0});
}

std::vector<Atom> RSBMeasure::atoms() const {
  std::vector<Atom> out;
  for (int p = 1; p <= k_ + 1; ++p) {
    const auto i = static_cast<std::size_t>(p);
    out.push_back({q_[i], m_[i] - m_[i - 1]});
  }
  return out;
}

std::vector<Atom> RSBMeasure::support() const {
  std::vector<Atom> out;
  for (const Atom& a : atoms()) {
    if (a.mass > 0.0) out.push_back(a);
  }
  return out;
}

double RSBMeasure::cdf(double u) const {
  if (!in_unit(u)) throw Error(ErrorCode::DomainError, "cdf argument outside [0,1]");
  double value = 0.0;
  for (int p = 1; p <= k_ + 1; ++p) {
    const auto i = static_cast<std::size_t>(p);
    if (q_[i] <= u) value = m_[i];
  }
  return value;
}

double RSBMeasure::cdf_left(double u) const {
  if (!in_unit(u)) throw Error(ErrorCode::DomainError, "cdf argument outside [0,1]");
  double value = 0.0;
  for (int p = 1; p <= k_ + 1; ++p) {
    const auto i = static_cast<std::size_t>(p);
    if (q_[i] < u) value = m_[i];
  }
  return value;
}

RSBMeasure make_rsb(int k, std::vector<double> m, std::vector<double> q) {
  return RSBMeasure::make(k, std::move(m), std::move(q));
}

// ------------------------------------------------------------ GeneralMeasure

GeneralMeasure GeneralMeasure::make(std::vector<Atom> atoms, std::vector<DensitySegment> segments) {
  for (const Atom& a : atoms) {
    if (!in_unit(a.q) || !std::isfinite(a.mass) || a.mass <= 0.0 || a.mass > 1.0) {
      throw Error(ErrorCode::RangeViolation, "atom needs q in [0,1] and mass in (0,1]");
    }
  }
  atoms = sort_and_merge(std::move(atoms));
  std::sort(segments.begin(), segments.end(),
            [](const DensitySegment& x, const DensitySegment& y) { return x.a < y.a; });
  double total = 0.0;
  for (const Atom& a : atoms) total += a.mass;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!in_unit(s.a) || !in_unit(s.b) || !(s.a < s.b) || s.values.size() < 2) {
      throw Error(ErrorCode::RangeViolation, "density segment needs 0 <= a < b <= 1 and >= 2 values");
    }
    for (double v : s.values) {
      if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::RangeViolation, "negative density value");
    }
    if (i > 0 && segments[i - 1].b > s.a) {
      throw Error(ErrorCode::OrderingViolation, "density segments overlap");
    }
    total += segment_mass(s);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::RangeViolation, "total mass " + std::to_string(total) + " differs from 1");
  }
  return GeneralMeasure(std::move(atoms), std::move(segments));
}

GeneralMeasure GeneralMeasure::from_rsb(const RSBMeasure& mu) {
  return GeneralMeasure(mu.support(), {});
}

double GeneralMeasure::atom_mass() const noexcept {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.mass;
  return s;
}

double GeneralMeasure::density_mass() const noexcept {
  double s = 0.0;
  for (const auto& seg : segments_) s += segment_mass(seg);
  return s;
}

double GeneralMeasure::cdf(double u) const {
  if (!in_unit(u)) throw Error(ErrorCode::DomainError, "cdf argument outside [0,1]");
  return std::min(1.0, PiecewiseCdf(*this).eval(u));
}

double GeneralMeasure::cdf_left(double u) const {
  if (!in_unit(u)) throw Error(ErrorCode::DomainError, "cdf argument outside [0,1]");
  return std::min(1.0, PiecewiseCdf(*this).eval_left(u));
}

double cdf(const RSBMeasure& mu, double u) { return mu.cdf(u); }
double cdf(const GeneralMeasure& mu, double u) { return mu.cdf(u); }

// -------------------------------------------------------------- PiecewiseCdf

PiecewiseCdf::PiecewiseCdf(const RSBMeasure& mu) : PiecewiseCdf(GeneralMeasure::from_rsb(mu)) {}

PiecewiseCdf::PiecewiseCdf(const GeneralMeasure& mu) {
  const auto dens = density_pieces(mu.segments());
  std::vector<double> cuts{0.0, 1.0};
  for (const Atom& a : mu.atoms()) cuts.push_back(a.q);
  for (const auto& d : dens) {
    cuts.push_back(d.start);
    cuts.push_back(d.end);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::size_t next_atom = 0;
  std::size_t piece = 0;
  double left_value = 0.0;
  const auto& atoms = mu.atoms();
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    double jump = 0.0;
    while (next_atom < atoms.size() && atoms[next_atom].q <= a) jump += atoms[next_atom++].mass;
    while (piece < dens.size() && dens[piece].end <= a) ++piece;
    double r0 = 0.0;
    double r1 = 0.0;
    if (piece < dens.size() && dens[piece].start <= a && a < dens[piece].end) {
      r0 = dens[piece].r0 + dens[piece].r1 * (a - dens[piece].start);
      r1 = dens[piece].r1;
    }
    Piece p{a, b, left_value + jump, r0, 0.5 * r1};
    const double len = b - a;
    left_value = p.c0 + p.c1 * len + p.c2 * len * len;
    pieces_.push_back(p);
  }
  while (next_atom < atoms.size()) mass_at_one_ += atoms[next_atom++].mass;
  finish();
}

void PiecewiseCdf::finish() {
  cumulative_.assign(pieces_.size() + 1, 0.0);
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    const double l = p.end - p.start;
    cumulative_[i + 1] = cumulative_[i] + p.c0 * l + 0.5 * p.c1 * l * l + p.c2 * l * l * l / 3.0;
  }
  suffix_.assign(pieces_.size() + 1, 0.0);
  for (std::size_t i = pieces_.size(); i-- > 0;) {
    suffix_[i] = suffix_[i + 1] + (cumulative_[i + 1] - cumulative_[i]);
  }
}

std::size_t PiecewiseCdf::locate(double u) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), u,
                             [](double v, const Piece& p) { return v < p.start; });
  if (it == pieces_.begin()) return 0;
  return static_cast<std::size_t>(it - pieces_.begin()) - 1;
}

double PiecewiseCdf::eval(double u) const {
  if (u < 0.0) return 0.0;
  if (u >= 1.0) {
    const auto& p = pieces_.back();
    const double l = p.end - p.start;
    return p.c0 + p.c1 * l + p.c2 * l * l + mass_at_one_;
  }
  const auto& p = pieces_[locate(u)];
  const double s = u - p.start;
  return p.c0 + p.c1 * s + p.c2 * s * s;
}

double PiecewiseCdf::eval_left(double u) const {
  if (u <= 0.0) return 0.0;
  if (u > 1.0) return eval(1.0);
  const std::size_t i = locate(u);
  const auto& p = pieces_[i];
  if (u == p.start && i > 0) {
    const auto& prev = pieces_[i - 1];
    const double l = prev.end - prev.start;
    return prev.c0 + prev.c1 * l + prev.c2 * l * l;
  }
  if (u >= 1.0 || u > p.end) {
    const double l = p.end - p.start;
    return p.c0 + p.c1 * l + p.c2 * l * l;
  }
  const double s = u - p.start;
  return p.c0 + p.c1 * s + p.c2 * s * s;
}

double PiecewiseCdf::integral(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return cumulative_.back();
  const std::size_t i = locate(u);
  const auto& p = pieces_[i];
  const double s = u - p.start;
  return cumulative_[i] + p.c0 * s + 0.5 * p.c1 * s * s + p.c2 * s * s * s / 3.0;
}

double PiecewiseCdf::tail_integral(double u) const {
  if (u <= 0.0) return suffix_.front();
  if (u >= 1.0) return 0.0;
  const std::size_t i = locate(u);
  const auto& p = pieces_[i];
  // int_u^end of c0 + c1 s + c2 s^2, in powers of the distance to the end
  const double l = p.end - p.start;
  const double s = u - p.start;
  const double r = l - s;
  const double fe = p.c0 + p.c1 * l + p.c2 * l * l;
  const double de = p.c1 + 2.0 * p.c2 * l;
  return suffix_[i + 1] + fe * r - 0.5 * de * r * r + p.c2 * r * r * r / 3.0;
}

// -------------------------------------------------------------------- metric

double metric_d(const PiecewiseCdf& a, const PiecewiseCdf& b) {
  std::vector<double> cuts{1.0};
  for (const auto& p : a.pieces()) cuts.push_back(p.start);
  for (const auto& p : b.pieces()) cuts.push_back(p.start);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto local = [](const PiecewiseCdf& f, double x, double& A, double& B, double& C) {
    const auto& ps = f.pieces();
    auto it = std::upper_bound(ps.begin(), ps.end(), x,
                               [](double v, const PiecewiseCdf::Piece& p) { return v < p.start; });
    const auto& p = *(it == ps.begin() ? it : it - 1);
    const double s = x - p.start;
    A = p.c0 + p.c1 * s + p.c2 * s * s;
    B = p.c1 + 2.0 * p.c2 * s;
    C = p.c2;
  };

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double A1, B1, C1, A2, B2, C2;
    local(a, cuts[i], A1, B1, C1);
    local(b, cuts[i], A2, B2, C2);
    total += abs_quadratic_integral(A1 - A2, B1 - B2, C1 - C2, cuts[i + 1] - cuts[i]);
  }
  return total;
}

double metric_d(const RSBMeasure& a, const RSBMeasure& b) {
  return metric_d(PiecewiseCdf(a), PiecewiseCdf(b));
}
double metric_d(const GeneralMeasure& a, const GeneralMeasure& b) {
  return metric_d(PiecewiseCdf(a), PiecewiseCdf(b));
}
double metric_d(const GeneralMeasure& a, const RSBMeasure& b) {
  return metric_d(PiecewiseCdf(a), PiecewiseCdf(b));
}
double metric_d(const RSBMeasure& a, const GeneralMeasure& b) {
  return metric_d(PiecewiseCdf(a), PiecewiseCdf(b));
}

// ---------------------------------------------------------------- discretize

RSBMeasure discretize(const GeneralMeasure& g, int n) {
  const auto n_atoms = static_cast<int>(g.atoms().size());
  const double dens_mass = g.density_mass();
  const bool has_density = dens_mass > 0.0;
  if (n < 1 || n < n_atoms || (has_density && n == n_atoms)) {
    throw Error(ErrorCode::CapacityError,
                "cannot quantize into " + std::to_string(n) + " atoms (measure has " +
                    std::to_string(n_atoms) + " atoms" + (has_density ? " plus a density)" : ")"));
  }
  std::vector<Atom> out = g.atoms();
  if (!has_density) return RSBMeasure::from_atoms(out);

  const auto pieces = density_pieces(g.segments());
  std::vector<double> mass_before{0.0};
  for (const auto& p : pieces) {
    const double l = p.end - p.start;
    mass_before.push_back(mass_before.back() + p.r0 * l + 0.5 * p.r1 * l * l);
  }
  // Position and first moment at a given cumulative density mass.
  auto locate_level = [&](double level, double& pos, double& moment) {
    moment = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const auto& p = pieces[i];
      const double l = p.end - p.start;
      auto first_moment = [&](double t) {
        return p.start * (p.r0 * t + 0.5 * p.r1 * t * t) + 0.5 * p.r0 * t * t + p.r1 * t * t * t / 3.0;
      };
      if (level <= mass_before[i + 1] || i + 1 == pieces.size()) {
        const double delta = std::max(0.0, level - mass_before[i]);
        const double disc = std::max(0.0, p.r0 * p.r0 + 2.0 * p.r1 * delta);
        const double denom = p.r0 + std::sqrt(disc);
        double t = denom > 0.0 ? 2.0 * delta / denom : 0.0;
        t = std::clamp(t, 0.0, l);
        pos = p.start + t;
        moment += first_moment(t);
        return;
      }
      moment += first_moment(l);
    }
    pos = pieces.empty() ? 0.0 : pieces.back().end;
  };

  const int slices = n - n_atoms;
  const double w = dens_mass / slices;
  double prev_pos = 0.0;
  double prev_moment = 0.0;
  locate_level(0.0, prev_pos, prev_moment);
  for (int j = 1; j <= slices; ++j) {
    double pos = 0.0;
    double moment = 0.0;
    locate_level(j == slices ? dens_mass : w * j, pos, moment);
    const double mean = std::clamp((moment - prev_moment) / w, prev_pos, pos);
    out.push_back({mean, w});
    prev_pos = pos;
    prev_moment = moment;
  }
  double total = 0.0;
  for (const Atom& a : out) total += a.mass;
  for (Atom& a : out) a.mass /= total;
  return RSBMeasure::from_atoms(std::move(out));
}

}  // namespace parisi
