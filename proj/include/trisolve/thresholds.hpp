#pragma once

#include "trisolve/coefficient_field.hpp"
#include "trisolve/nonlinearity.hpp"

#include <limits>
#include <string>

namespace trisolve {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// closed_form: exact evaluation from the polynomial structure.
/// sampled: log-grid estimate for analytic nonlinearities (heuristic).
enum class Exactness { closed_form, sampled };

const char* to_string(Exactness e);

/// sup over xi != 0 of int_Omega F(x, xi) dx / |xi|^p and where it is attained.
struct SupRatio {
  double value = 0.0;
  /// Attaining xi; +-inf or 0 when the supremum is a limit, NaN when the ratio vanishes.
  double maximizer = std::numeric_limits<double>::quiet_NaN();
  Exactness exactness = Exactness::closed_form;
};

/// limsup_{xi -> 0} sup_x F(x, xi) / |xi|^p.
double compute_rho1(const Nonlinearity& f, double p);
/// limsup_{|xi| -> inf} sup_x F(x, xi) / |xi|^p.
double compute_rho2(const Nonlinearity& f, double p);
SupRatio compute_sup_ratio(const Nonlinearity& f, double p);

/// Left end of the lambda window: (int alpha / p) / sup_ratio, +inf when sup_ratio <= 0.
double compute_gamma(const Nonlinearity& f, const CoefficientField& alpha, double p);
/// Right end: inf alpha / (p max{0, rho1, rho2}), +inf when the max vanishes.
double compute_delta(const Nonlinearity& f, const CoefficientField& alpha, double p);

struct ThresholdReport {
  double rho1 = 0.0;
  double rho2 = 0.0;
  SupRatio sup_ratio;
  double gamma = kInfinity;
  double delta = kInfinity;
  /// max{0, rho1, rho2}
  double condition1_lhs = 0.0;
  /// (inf alpha / int alpha) * sup_ratio
  double condition1_rhs = 0.0;
  bool condition1_holds = false;
  /// Open interval ]gamma, delta[; only meaningful when condition1_holds.
  double interval_lo = kInfinity;
  double interval_hi = kInfinity;
  Exactness exactness = Exactness::closed_form;

  bool interval_empty() const { return !condition1_holds; }
  bool contains(double lambda) const {
    return condition1_holds && lambda > interval_lo && lambda < interval_hi;
  }
};

/// Full threshold analysis. Throws ParameterError when alpha is not positive,
/// p <= 1, the domains differ, or f is outside the growth class for
/// (p, dim of the domain).
ThresholdReport check_condition1(const Nonlinearity& f, const CoefficientField& alpha, double p);

/// Closed-form thresholds for f = beta(x)(a xi + b xi^2 - c xi^3), p = 2.
struct Prop1Report {
  double gamma0 = kInfinity;
  double delta0 = kInfinity;
  bool a_constraint_ok = false; // a > -2 b^2 / (9 c)
  bool condition8_applicable = false; // only when a > 0
  bool condition8_holds = false;
  double condition8_lhs = 0.0; // sup beta * int alpha / (inf alpha * int beta)
  double condition8_rhs = 0.0; // 1 + 2 b^2 / (9 a c)

  /// All hypotheses met: the a-constraint and, when a > 0, the coefficient ratio bound.
  bool hypotheses_hold() const {
    return a_constraint_ok && (!condition8_applicable || condition8_holds);
  }
};

/// Throws ParameterError for c <= 0, inf alpha <= 0, inf beta < 0 or
/// int beta <= 0. A violated a-constraint is reported, not thrown; gamma0 is
/// then +inf.
Prop1Report prop1_thresholds(const CoefficientField& alpha, const CoefficientField& beta, double a,
                             double b, double c);

struct ConsistencyReport {
  bool consistent = false;
  double gamma_relative_error = 0.0;
  bool delta_match = false;
  std::string detail;
};

/// Agreement of the closed-form cubic thresholds with the general path:
/// |gamma0 - gamma| <= 1e-10 gamma and delta0 == delta (both +inf allowed).
ConsistencyReport consistency_vs_theorem1(const Prop1Report& prop1, const ThresholdReport& general);

} // namespace trisolve
