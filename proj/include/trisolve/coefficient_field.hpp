#pragma once

#include <array>
#include <variant>
#include <vector>

namespace trisolve {

using Point = std::array<double, 3>;

/// Axis-aligned box [0, extents[0]] x ... x [0, extents[dim-1]].
struct Box {
  int dim = 2;
  std::array<double, 3> extents{1.0, 1.0, 1.0};

  double volume() const;
  bool contains(const Point& x) const;
  /// Throws DomainError when x lies outside the box.
  void require_contains(const Point& x) const;
  /// Throws ParameterError unless dim is 2 or 3 and every extent is positive.
  void validate() const;
};

/// Spatial coefficient on a box: alpha, beta, or the x-factor of a nonlinearity.
///
/// Bounds and integral are cached at construction. For the sampled kind the
/// nodal values live on the structured grid used by build_box_mesh and are
/// interpolated piecewise-linearly on the same Kuhn triangulation, so inf/sup
/// over nodal values are the exact bounds of the interpolant.
class CoefficientField {
public:
  enum class Kind { constant, affine, sampled };

  static CoefficientField constant(const Box& box, double value);
  static CoefficientField affine(const Box& box, double base, std::vector<double> slope);
  static CoefficientField sampled(const Box& box, std::vector<int> divisions,
                                  std::vector<double> nodal_values);

  double operator()(const Point& x) const;

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::constant; }
  const Box& domain() const { return box_; }
  double inf() const { return inf_; }
  double sup() const { return sup_; }
  double integral() const { return integral_; }

  CoefficientField scaled(double t) const;

  /// Throws ParameterError unless inf > 0.
  void require_alpha_role(const char* name = "alpha") const;
  /// Throws ParameterError unless inf >= 0 and integral > 0.
  void require_beta_role(const char* name = "beta") const;

private:
  struct Constant {
    double value;
  };
  struct Affine {
    double base;
    std::vector<double> slope;
  };
  struct Sampled {
    std::vector<int> divisions;
    std::vector<double> values;
  };

  CoefficientField(const Box& box, std::variant<Constant, Affine, Sampled> repr);
  void cache();
  double eval_sampled(const Sampled& s, const Point& x) const;

  Box box_;
  std::variant<Constant, Affine, Sampled> repr_;
  double inf_ = 0.0;
  double sup_ = 0.0;
  double integral_ = 0.0;
};

} // namespace trisolve
