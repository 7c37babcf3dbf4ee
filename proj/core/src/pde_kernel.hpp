#pragma once

#include "parisi/parisi_pde.hpp"
#include "parisi/quadrature.hpp"

namespace parisi::detail {

/// Phi and derivatives of log cosh(y) + offset.
void analytic_point(double y, double offset, double out[4]);

struct GridView {
  double x_max = 0.0;
  double dx = 0.0;

  /// Four-point Lagrange interpolation; asymptotic extension past x_max.
  void sample(const Slice& s, double y, double out[4], bool derivs) const;
};

/// Either a stored slice or the closed form log cosh + offset.
struct Source {
  const Slice* slice = nullptr;
  double offset = 0.0;
};

void fill_analytic(Slice& s, const std::vector<double>& x, double offset);

void cole_hopf_point(const Source& top, const GridView& view, const GaussHermite& gh, double m,
                     double sigma, double x, bool derivs, double out[4]);

Slice cole_hopf_slice(const Source& top, const GridView& view, const std::vector<double>& x,
                      const GaussHermite& gh, double m, double var, double u, bool derivs);

}  // namespace parisi::detail
