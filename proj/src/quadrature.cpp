#include "trisolve/quadrature.hpp"

#include "trisolve/errors.hpp"

#include <cmath>
#include <numbers>

namespace trisolve {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1)
    throw ParameterError("gauss_legendre: need at least one node");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const auto iu = static_cast<std::size_t>(i);
    nodes[iu] = 0.5 * (1.0 - x);
    weights[iu] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

SimplexRule simplex_rule(int dim, int degree) {
  if (dim != 2 && dim != 3)
    throw ParameterError("simplex_rule: dim must be 2 or 3");
  if (degree < 0)
    throw ParameterError("simplex_rule: degree must be nonnegative");
  SimplexRule rule;
  rule.dim = dim;
  rule.degree = degree;
  // the collapse adds (dim - 1) powers of (1 - u) to the first direction
  const int n = (degree + dim + 1) / 2;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  if (dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double u = x[static_cast<std::size_t>(i)];
        const double v = x[static_cast<std::size_t>(j)];
        const double px = u;
        const double py = v * (1.0 - u);
        rule.bary.push_back({1.0 - px - py, px, py, 0.0});
        rule.weights.push_back(2.0 * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] * (1.0 - u));
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double u = x[static_cast<std::size_t>(i)];
          const double v = x[static_cast<std::size_t>(j)];
          const double t = x[static_cast<std::size_t>(k)];
          const double px = u;
          const double py = v * (1.0 - u);
          const double pz = t * (1.0 - u) * (1.0 - v);
          rule.bary.push_back({1.0 - px - py - pz, px, py, pz});
          rule.weights.push_back(6.0 * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] *
                                 w[static_cast<std::size_t>(k)] * (1.0 - u) * (1.0 - u) * (1.0 - v));
        }
  }
  return rule;
}

} // namespace trisolve
