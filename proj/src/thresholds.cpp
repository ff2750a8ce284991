#include "trisolve/thresholds.hpp"

#include "trisolve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace trisolve {

const char* to_string(Exactness e) {
  return e == Exactness::closed_form ? "closed_form" : "sampled";
}

namespace {

constexpr double kSampledTol = 1e-12;
constexpr int kPointsPerDecade = 64;

// Weights applied to H(xi) depending on its sign: the ratio on a side is
// w(H) H(xi) / |xi|^p with w = w_pos when H > 0 and w_neg otherwise.
struct SignWeights {
  double pos;
  double neg;
  double operator()(double h) const { return h > 0.0 ? pos : neg; }
};

// One-sided limit of w(H) H / |xi|^p for polynomial H as xi -> 0 (at_zero)
// or |xi| -> inf, on the side sign(xi) = side.
double side_limit(const Polynomial& H, double p, SignWeights w, bool at_zero, int side) {
  if (H.is_zero())
    return 0.0;
  const int k = at_zero ? H.lowest_degree() : H.degree();
  const double coef = H.coeff(k);
  const double parity = (side < 0 && (k % 2 == 1)) ? -1.0 : 1.0;
  const double leading = coef * parity; // sign of H near the limit on this side
  const double e = leading * w(leading);
  const double kd = static_cast<double>(k);
  if (kd == p)
    return e;
  const bool vanishes = at_zero ? (kd > p) : (kd < p);
  if (vanishes || e == 0.0)
    return 0.0;
  return e > 0.0 ? kInfinity : -kInfinity;
}

double limsup(const Polynomial& H, double p, SignWeights w, bool at_zero) {
  return std::max(side_limit(H, p, w, at_zero, +1), side_limit(H, p, w, at_zero, -1));
}

// symmetric log grid +-10^e, e in [lo, hi], kPointsPerDecade per decade
std::vector<double> positive_log_grid(int lo, int hi) {
  std::vector<double> g;
  const int count = (hi - lo) * kPointsPerDecade;
  g.reserve(static_cast<std::size_t>(count) + 1);
  for (int k = 0; k <= count; ++k)
    g.push_back(std::pow(10.0, lo + static_cast<double>(k) / kPointsPerDecade));
  return g;
}

double sampled_sup(const std::vector<double>& grid, double p, const auto& numerator) {
  double best = -kInfinity;
  for (double xi : grid)
    for (double s : {xi, -xi})
      best = std::max(best, numerator(s) / std::pow(std::abs(s), p));
  return best;
}

void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw ParameterError("exponent p must satisfy 1 < p < inf");
}

} // namespace

double compute_rho1(const Nonlinearity& f, double p) {
  require_p(p);
  const SignWeights w{f.spatial().sup(), f.spatial().inf()};
  if (f.is_polynomial())
    return limsup(f.shape_polynomial_primitive(), p, w, true);
  // innermost decade of the grid approximates the limit
  return sampled_sup(positive_log_grid(-8, -7), p, [&](double xi) { return f.sup_primitive(xi); });
}

double compute_rho2(const Nonlinearity& f, double p) {
  require_p(p);
  const SignWeights w{f.spatial().sup(), f.spatial().inf()};
  if (f.is_polynomial())
    return limsup(f.shape_polynomial_primitive(), p, w, false);
  return sampled_sup(positive_log_grid(7, 8), p, [&](double xi) { return f.sup_primitive(xi); });
}

SupRatio compute_sup_ratio(const Nonlinearity& f, double p) {
  require_p(p);
  SupRatio out;
  const double integral = f.spatial().integral();
  if (!f.is_polynomial()) {
    out.exactness = Exactness::sampled;
    double best = -kInfinity;
    for (double xi : positive_log_grid(-8, 8))
      for (double s : {xi, -xi}) {
        const double r = f.integral_primitive(s) / std::pow(std::abs(s), p);
        if (r > best) {
          best = r;
          out.maximizer = s;
        }
      }
    out.value = best;
    return out;
  }

  const Polynomial& H = f.shape_polynomial_primitive();
  if (H.is_zero() || integral == 0.0) {
    out.value = 0.0;
    return out;
  }
  const SignWeights w{integral, integral};
  auto consider = [&](double value, double at) {
    if (value > out.value || std::isnan(out.maximizer)) {
      out.value = value;
      out.maximizer = at;
    }
  };
  out.value = -kInfinity;
  consider(side_limit(H, p, w, true, +1), 0.0);
  consider(side_limit(H, p, w, true, -1), -0.0);
  consider(side_limit(H, p, w, false, +1), kInfinity);
  consider(side_limit(H, p, w, false, -1), -kInfinity);

  // stationary points of H(xi)/|xi|^p on either half-line: xi H'(xi) - p H(xi) = 0
  std::vector<double> n(static_cast<std::size_t>(H.degree()) + 1, 0.0);
  for (int i = 0; i <= H.degree(); ++i)
    n[static_cast<std::size_t>(i)] = (static_cast<double>(i) - p) * H.coeff(i);
  const Polynomial stationarity(n);
  if (stationarity.is_zero()) {
    // H = coef xi^p: the ratio is constant on each half-line
    consider(integral * H(1.0), 1.0);
    consider(integral * H(-1.0), -1.0);
    return out;
  }
  for (double xi : stationarity.real_roots()) {
    if (xi == 0.0)
      continue;
    consider(integral * H(xi) / std::pow(std::abs(xi), p), xi);
  }
  return out;
}

double compute_gamma(const Nonlinearity& f, const CoefficientField& alpha, double p) {
  const double s = compute_sup_ratio(f, p).value;
  if (!(s > 0.0))
    return kInfinity;
  return (alpha.integral() / p) / s;
}

double compute_delta(const Nonlinearity& f, const CoefficientField& alpha, double p) {
  const double m = std::max({0.0, compute_rho1(f, p), compute_rho2(f, p)});
  if (m == 0.0)
    return kInfinity;
  return alpha.inf() / (p * m);
}

ThresholdReport check_condition1(const Nonlinearity& f, const CoefficientField& alpha, double p) {
  require_p(p);
  alpha.require_alpha_role();
  const Box& box = alpha.domain();
  if (box.dim != f.spatial().domain().dim || box.volume() != f.spatial().domain().volume())
    throw ParameterError("alpha and the nonlinearity are defined on different domains");
  const GrowthReport growth = check_growth(f, p, box.dim);
  if (!growth.admissible) {
    std::ostringstream os;
    os << "nonlinearity growth exponent q = " << growth.q << " is not below " << growth.q_limit
       << " for p = " << p << ", n = " << box.dim;
    throw ParameterError(os.str());
  }

  ThresholdReport r;
  r.rho1 = compute_rho1(f, p);
  r.rho2 = compute_rho2(f, p);
  r.sup_ratio = compute_sup_ratio(f, p);
  r.exactness = f.is_polynomial() ? Exactness::closed_form : Exactness::sampled;
  r.gamma = r.sup_ratio.value > 0.0 ? (alpha.integral() / p) / r.sup_ratio.value : kInfinity;
  r.condition1_lhs = std::max({0.0, r.rho1, r.rho2});
  r.delta = r.condition1_lhs == 0.0 ? kInfinity : alpha.inf() / (p * r.condition1_lhs);
  r.condition1_rhs = (alpha.inf() / alpha.integral()) * r.sup_ratio.value;

  if (r.exactness == Exactness::closed_form || std::isinf(r.condition1_rhs)) {
    r.condition1_holds = r.condition1_lhs < r.condition1_rhs;
  } else {
    r.condition1_holds =
        r.condition1_lhs < r.condition1_rhs - kSampledTol * std::max(1.0, std::abs(r.condition1_rhs));
  }
  if (r.condition1_holds) {
    r.interval_lo = r.gamma;
    r.interval_hi = r.delta;
  }
  return r;
}

Prop1Report prop1_thresholds(const CoefficientField& alpha, const CoefficientField& beta, double a,
                             double b, double c) {
  if (!(c > 0.0))
    throw ParameterError("cubic thresholds: c must be positive");
  alpha.require_alpha_role("alpha");
  beta.require_beta_role("beta");

  Prop1Report r;
  r.a_constraint_ok = a > -2.0 * b * b / (9.0 * c);
  const double denom = (9.0 * a * c + 2.0 * b * b) * beta.integral();
  r.gamma0 = r.a_constraint_ok ? 9.0 * c * alpha.integral() / denom : kInfinity;
  const double m = std::max(0.0, a) * beta.sup();
  r.delta0 = m == 0.0 ? kInfinity : alpha.inf() / m;
  r.condition8_applicable = a > 0.0;
  if (r.condition8_applicable) {
    r.condition8_lhs = beta.sup() * alpha.integral() / (alpha.inf() * beta.integral());
    r.condition8_rhs = 1.0 + 2.0 * b * b / (9.0 * a * c);
    r.condition8_holds = r.condition8_lhs < r.condition8_rhs;
  }
  return r;
}

ConsistencyReport consistency_vs_theorem1(const Prop1Report& prop1, const ThresholdReport& general) {
  ConsistencyReport out;
  const double g0 = prop1.gamma0;
  const double g = general.gamma;
  bool gamma_ok = false;
  if (std::isinf(g0) || std::isinf(g)) {
    gamma_ok = g0 == g;
    out.gamma_relative_error = gamma_ok ? 0.0 : kInfinity;
  } else {
    out.gamma_relative_error = std::abs(g0 - g) / g;
    gamma_ok = std::abs(g0 - g) <= 1e-10 * g;
  }
  const double d0 = prop1.delta0;
  const double d = general.delta;
  if (std::isinf(d0) || std::isinf(d))
    out.delta_match = d0 == d;
  else
    out.delta_match = std::abs(d0 - d) <= 1e-14 * std::abs(d);
  out.consistent = gamma_ok && out.delta_match;
  if (!out.consistent) {
    std::ostringstream os;
    os.precision(17);
    os << "gamma0 = " << g0 << " vs gamma = " << g << "; delta0 = " << d0 << " vs delta = " << d;
    out.detail = os.str();
  }
  return out;
}

} // namespace trisolve
