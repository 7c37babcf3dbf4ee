#include "parisi/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "parisi/error.hpp"

namespace parisi {
namespace {

GaussHermite golub_welsch(int order) {
  // Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    J(i, i - 1) = J(i - 1, i) = std::sqrt(static_cast<double>(i));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  GaussHermite rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  double total = 0.0;
  for (int i = 0; i < order; ++i) {
    const double v = eig.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = v * v;
    total += v * v;
  }
  for (auto& w : rule.weights) w /= total;
  // Exact symmetry keeps even/odd structure of downstream grids intact.
  for (std::size_t i = 0, j = rule.size() - 1; i < j; ++i, --j) {
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[rule.size() / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussHermite& gauss_hermite(int order) {
  if (order < 1 || order > 1000) {
    throw Error(ErrorCode::InvalidArgument, "Gauss-Hermite order " + std::to_string(order));
  }
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermite>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussHermite>(golub_welsch(order));
  return *slot;
}

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

// Single 15/31 panel; err is returned in the units of the original variable.
double rule(const std::function<double(double)>& f, double a, double b, double& err) {
  const double r = Rule::integrate(f, a, b, 0, 0.0, &err);
  err *= 0.5 * (b - a);
  return r;
}

double adapt(const std::function<double(double)>& f, double a, double b, double whole, double err,
             double abs_tol, int depth) {
  if (err <= abs_tol || depth <= 0 || !std::isfinite(whole)) return whole;
  const double mid = 0.5 * (a + b);
  double el = 0.0, er = 0.0;
  const double left = rule(f, a, mid, el);
  const double right = rule(f, mid, b, er);
  return adapt(f, a, mid, left, el, 0.5 * abs_tol, depth - 1) +
         adapt(f, mid, b, right, er, 0.5 * abs_tol, depth - 1);
}

double finite(const std::function<double(double)>& f, double a, double b, double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  double err = 0.0;
  const double whole = rule(f, a, b, err);
  const double abs_tol = std::max(rel_tol * std::abs(whole), 1e-300);
  return adapt(f, a, b, whole, err, abs_tol, max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, int max_depth) {
  if (std::isinf(b)) {
    if (std::isinf(a)) throw Error(ErrorCode::InvalidArgument, "integrate needs a finite lower limit");
    // s = a + t / (1 - t)
    const std::function<double(double)> g = [&](double t) {
      const double w = 1.0 / (1.0 - t);
      return f(a + t * w) * w * w;
    };
    return finite(g, 0.0, 1.0, rel_tol, max_depth);
  }
  return finite(f, a, b, rel_tol, max_depth);
}

}  // namespace parisi
