#pragma once

#include <functional>
#include <vector>

namespace parisi {

/// Gauss-Hermite rule for a standard Gaussian: E f(z) ~ sum_i w_i f(z_i),
/// weights sum to 1. Nodes are symmetric about 0 and sorted ascending.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Cached per order; computed once by Golub-Welsch.
const GaussHermite& gauss_hermite(int order);

/// Adaptive Gauss-Kronrod (15/31) integral of f over [a, b]; b may be +infinity.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13, int max_depth = 15);

}  // namespace parisi
