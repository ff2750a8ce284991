#pragma once

#include "trisolve/nonlinearity.hpp"
#include "trisolve/polynomial.hpp"
#include "trisolve/problem.hpp"
#include "trisolve/thresholds.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace trisolve {

/// Constant solutions u = s of the constant-coefficient problem, i.e. the
/// real roots of alpha s |s|^{p-2} = lambda beta h(s).
struct ConstantSolutionReport {
  std::vector<double> roots;
  double lambda = 0.0;
  double p = 2.0;
  /// For p = 2, coefficients (ascending) of the polynomial alpha s - lambda beta h(s).
  std::vector<double> polynomial;
  /// max over roots of |alpha s |s|^{p-2} - lambda beta h(s)|
  double max_root_residual = 0.0;
};

/// `shape` is h with zero constant term. For p = 2 the roots come from the
/// polynomial equation; otherwise from sign-change bisection on [-R, R]
/// (tangential roots are not detected). Throws ParameterError unless
/// alpha > 0, beta >= 0 and lambda > 0.
ConstantSolutionReport constant_solutions(double alpha, double beta, const Polynomial& shape,
                                          double lambda, double p);

/// max_i |(E(u + h e_i) - E(u - h e_i)) / (2h) - R_i(u)| / (1 + |R_i(u)|).
double fd_gradient_check(const Problem& problem, const Vector& u, double h);

/// +-10^e for e in [lo, hi] with `per_decade` points per decade, ascending.
std::vector<double> symmetric_log_grid(int lo, int hi, int per_decade);

/// max over the grid of int_Omega F(x, xi) dx / |xi|^p; a lower bound for the
/// supremum used by the left threshold. Throws ParameterError on an empty
/// grid or a grid point at zero.
double brute_sup_ratio(const Nonlinearity& f, double p, std::span<const double> grid);

/// Restriction of sup J/Phi to constant functions u = s, s on a grid.
struct ConstantRatioDiagnostic {
  double sup_ratio = 0.0;
  double argmax = 0.0;
  /// (p / int alpha) * sup_xi int F / |xi|^p
  double predicted = 0.0;
};

ConstantRatioDiagnostic constant_ratio_diagnostic(const Problem& problem,
                                                  std::span<const double> grid);

/// Sampled one-sided check of the asymptotic bound on J/Phi near 0 and infinity.
struct AsymptoticDiagnostic {
  double max_ratio_small = 0.0; // over ||u|| <= 1e-3
  double max_ratio_large = 0.0; // over ||u|| >= 1e3
  double bound = 0.0;           // p max{rho1, rho2, 0} / inf alpha + 0.1
  int samples = 0;
  bool within_bound = false;
};

AsymptoticDiagnostic asymptotic_ratio_diagnostic(const Problem& problem,
                                                 const ThresholdReport& thresholds, int samples,
                                                 std::uint64_t seed);

} // namespace trisolve
