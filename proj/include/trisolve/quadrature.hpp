#pragma once

#include <array>
#include <vector>

namespace trisolve {

/// Quadrature on the reference simplex in barycentric form. Weights are
/// fractions of the simplex measure and sum to one.
struct SimplexRule {
  int dim = 2;
  int degree = 0;
  std::vector<std::array<double, 4>> bary;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed (Duffy) Gauss product rule exact for polynomials of total degree
/// <= degree on a triangle (dim 2) or tetrahedron (dim 3).
SimplexRule simplex_rule(int dim, int degree);

} // namespace trisolve
