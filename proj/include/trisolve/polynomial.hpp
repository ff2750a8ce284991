#pragma once

#include <span>
#include <vector>

namespace trisolve {

/// Dense real polynomial, coefficient i multiplies x^i.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  /// Degree of the highest nonzero coefficient; -1 for the zero polynomial.
  int degree() const;
  /// Index of the lowest nonzero coefficient; -1 for the zero polynomial.
  int lowest_degree() const;
  bool is_zero() const { return degree() < 0; }

  double operator()(double x) const;
  double coeff(int i) const;
  const std::vector<double>& coeffs() const { return coeffs_; }

  Polynomial derivative() const;
  /// Antiderivative vanishing at 0.
  Polynomial antiderivative() const;
  Polynomial scaled(double t) const;

  /// Real roots, ascending, deduplicated. Uses eigenvalues of the balanced
  /// companion matrix followed by Newton polishing. Roots at zero are found
  /// exactly by factoring out the lowest power of x.
  std::vector<double> real_roots() const;

private:
  std::vector<double> coeffs_;
};

} // namespace trisolve
