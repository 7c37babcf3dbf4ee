#pragma once

#include <vector>

namespace parisi {

struct Atom {
  double q = 0.0;
  double mass = 0.0;
};

/// Locations closer than this are treated as one atom.
inline constexpr double kAtomMergeTol = 1e-12;

/// Purely atomic probability measure on [0, 1] in triplet form (k, m, q):
/// mu([0, q_p]) = m_p, with atoms at q_1..q_{k+1} of mass m_p - m_{p-1}.
class RSBMeasure {
 public:
  /// Validates the triplet. Throws Error{OrderingViolation | RangeViolation}.
  static RSBMeasure make(int k, std::vector<double> m, std::vector<double> q);

  /// Builds the triplet from an unordered atom list; atoms are sorted,
  /// co-located atoms merged and zero-mass atoms dropped. Total mass must be
  /// 1 within 1e-9 and is then pinned to exactly 1.
  static RSBMeasure from_atoms(std::vector<Atom> atoms);

  static RSBMeasure dirac(double q);

  int k() const noexcept { return k_; }
  const std::vector<double>& m() const noexcept { return m_; }
  const std::vector<double>& q() const noexcept { return q_; }

  /// Atoms at q_1..q_{k+1}, including zero-mass ones.
  std::vector<Atom> atoms() const;
  /// Atoms with strictly positive mass.
  std::vector<Atom> support() const;

  /// x_mu(u) = mu([0, u]).
  double cdf(double u) const;
  /// mu([0, u)).
  double cdf_left(double u) const;

 private:
  RSBMeasure(int k, std::vector<double> m, std::vector<double> q)
      : k_(k), m_(std::move(m)), q_(std::move(q)) {}

  int k_ = 0;
  std::vector<double> m_;
  std::vector<double> q_;
};

/// Piecewise-linear density on [a, b] sampled at equally spaced nodes.
struct DensitySegment {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> values;
};

/// Atoms plus piecewise-linear density segments; used for measures with a
/// continuous part.
class GeneralMeasure {
 public:
  /// Throws Error{RangeViolation | OrderingViolation} when the invariants
  /// (unit mass within 1e-12, increasing atoms, disjoint segments,
  /// nonnegative density) fail.
  static GeneralMeasure make(std::vector<Atom> atoms, std::vector<DensitySegment> segments);
  static GeneralMeasure from_rsb(const RSBMeasure& mu);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<DensitySegment>& segments() const noexcept { return segments_; }

  double atom_mass() const noexcept;
  double density_mass() const noexcept;

  double cdf(double u) const;
  double cdf_left(double u) const;

 private:
  GeneralMeasure(std::vector<Atom> atoms, std::vector<DensitySegment> segments)
      : atoms_(std::move(atoms)), segments_(std::move(segments)) {}

  std::vector<Atom> atoms_;
  std::vector<DensitySegment> segments_;
};

/// Distribution function of a measure as a right-continuous piecewise
/// quadratic: F(u) = c0 + c1 s + c2 s^2 with s = u - start on each piece.
class PiecewiseCdf {
 public:
  struct Piece {
    double start = 0.0;
    double end = 0.0;
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
  };

  explicit PiecewiseCdf(const RSBMeasure& mu);
  explicit PiecewiseCdf(const GeneralMeasure& mu);

  const std::vector<Piece>& pieces() const noexcept { return pieces_; }

  double eval(double u) const;
  double eval_left(double u) const;
  /// int_0^u F(s) ds.
  double integral(double u) const;
  /// int_u^1 F(s) ds, summed from the right so it stays accurate as u -> 1.
  double tail_integral(double u) const;

 private:
  void finish();
  std::size_t locate(double u) const;

  std::vector<Piece> pieces_;
  double mass_at_one_ = 0.0;
  std::vector<double> cumulative_;
  std::vector<double> suffix_;
};

RSBMeasure make_rsb(int k, std::vector<double> m, std::vector<double> q);

double cdf(const RSBMeasure& mu, double u);
double cdf(const GeneralMeasure& mu, double u);

/// d(mu, nu) = int_0^1 |mu([0,u]) - nu([0,u])| du, exact for both measure
/// kinds (the difference is piecewise quadratic).
double metric_d(const PiecewiseCdf& a, const PiecewiseCdf& b);
double metric_d(const RSBMeasure& a, const RSBMeasure& b);
double metric_d(const GeneralMeasure& a, const GeneralMeasure& b);
double metric_d(const GeneralMeasure& a, const RSBMeasure& b);
double metric_d(const RSBMeasure& a, const GeneralMeasure& b);

/// Quantizes g into at most n atoms: existing atoms are kept and the
/// continuous part is cut into n - (#atoms) equal-mass slices, each replaced
/// by an atom at its conditional mean. Throws Error{CapacityError} when n
/// leaves no room for the continuous part.
RSBMeasure discretize(const GeneralMeasure& g, int n);

}  // namespace parisi
