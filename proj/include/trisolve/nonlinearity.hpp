#pragma once

#include "trisolve/coefficient_field.hpp"
#include "trisolve/polynomial.hpp"

#include <functional>
#include <string>
#include <vector>

namespace trisolve {

/// A Caratheodory nonlinearity of product form
///
///     f(x, xi) = s(x) * h(xi)
///
/// where s is a CoefficientField and h is either a polynomial without constant
/// term or a named analytic function with a declared growth bound
/// |h(xi)| <= C (1 + |xi|^q). The primitive F(x, xi) integrates from 0, so
/// F(x, 0) = 0 for every x.
class Nonlinearity {
public:
  enum class Shape { polynomial, analytic };

  /// h(xi) = a[0] xi + a[1] xi^2 + ... (coefficients start at the linear term).
  static Nonlinearity polynomial(CoefficientField spatial, std::vector<double> coeffs);
  /// beta(x) (a xi + b xi^2 - c xi^3).
  static Nonlinearity cubic(CoefficientField beta, double a, double b, double c);
  /// Named analytic h from the built-in catalog: "sin", "atan", "bounded-exp" (xi exp(-xi^2)).
  static Nonlinearity analytic(CoefficientField spatial, const std::string& name, double q, double C);
  /// Arbitrary analytic h with declared growth. Its primitive is computed by
  /// adaptive Gauss-Kronrod quadrature (relative tolerance 1e-10).
  static Nonlinearity analytic(CoefficientField spatial, std::string name,
                               std::function<double(double)> h, double q, double C);

  static const std::vector<std::string>& catalog();

  double value(const Point& x, double xi) const;
  double primitive(const Point& x, double xi) const;
  double derivative(const Point& x, double xi) const;

  // xi-only factor h, its primitive H(xi) = int_0^xi h, and h'
  double shape_value(double xi) const;
  double shape_primitive(double xi) const;
  double shape_derivative(double xi) const;

  /// int_Omega F(x, xi) dx = (int s) * H(xi).
  double integral_primitive(double xi) const;
  /// sup_x F(x, xi), exact for the product form.
  double sup_primitive(double xi) const;

  Shape shape() const { return shape_; }
  bool is_polynomial() const { return shape_ == Shape::polynomial; }
  /// h as a polynomial with zero constant term. Only meaningful for polynomial shape.
  const Polynomial& shape_polynomial() const { return poly_; }
  const Polynomial& shape_polynomial_primitive() const { return poly_primitive_; }
  const std::string& name() const { return name_; }
  const CoefficientField& spatial() const { return spatial_; }
  /// Growth exponent q: polynomial degree (at least 1), or the declared value.
  double growth_exponent() const;
  /// Declared (analytic) or derived (polynomial: sup|s| * sum|a_i|) growth constant.
  double growth_constant() const;
  /// Quadrature degree that integrates h along linear u exactly (polynomial case).
  int quadrature_degree() const;

  Nonlinearity scaled(double t) const;

private:
  Nonlinearity(CoefficientField spatial) : spatial_(std::move(spatial)) {}

  CoefficientField spatial_;
  Shape shape_ = Shape::polynomial;
  Polynomial poly_;
  Polynomial poly_primitive_;
  Polynomial poly_derivative_;
  std::string name_;
  std::function<double(double)> fn_;
  std::function<double(double)> primitive_fn_; // exact primitive for catalog entries
  double q_ = 1.0;
  double C_ = 0.0;
};

struct GrowthReport {
  double p = 2.0;
  int n = 2;
  double q = 1.0;
  double q_limit = 0.0; // +inf when p == n
  bool admissible = false;
};

/// Membership of a nonlinearity in the subcritical growth class for (p, n).
/// Throws ParameterError unless 1 < p <= n.
GrowthReport check_growth(const Nonlinearity& f, double p, int n);

} // namespace trisolve
