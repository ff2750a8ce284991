#include "trisolve/oracle.hpp"

#include "trisolve/errors.hpp"
#include "trisolve/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace trisolve {

namespace {

double constant_equation(double alpha, double beta, const Polynomial& shape, double lambda, double p,
                         double s) {
  const double lhs = p == 2.0 ? alpha * s : alpha * s * std::pow(std::abs(s), p - 2.0);
  return lhs - lambda * beta * shape(s);
}

std::vector<double> dedupe(std::vector<double> roots) {
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots)
    if (out.empty() || std::abs(r - out.back()) > 1e-12 * std::max(1.0, std::abs(r)))
      out.push_back(r);
  return out;
}

} // namespace

ConstantSolutionReport constant_solutions(double alpha, double beta, const Polynomial& shape,
                                          double lambda, double p) {
  if (!(alpha > 0.0))
    throw ParameterError("constant_solutions: alpha must be positive");
  if (!(beta >= 0.0))
    throw ParameterError("constant_solutions: beta must be nonnegative");
  if (!(lambda > 0.0))
    throw ParameterError("constant_solutions: lambda must be positive");
  if (!(p > 1.0))
    throw ParameterError("constant_solutions: p must exceed 1");
  if (shape.coeff(0) != 0.0)
    throw ParameterError("constant_solutions: nonlinearity must vanish at 0");

  ConstantSolutionReport report;
  report.lambda = lambda;
  report.p = p;
  const double lb = lambda * beta;

  if (p == 2.0) {
    std::vector<double> c(static_cast<std::size_t>(std::max(1, shape.degree())) + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
      c[i] = -lb * shape.coeff(static_cast<int>(i));
    c[1] += alpha;
    report.polynomial = c;
    report.roots = dedupe(Polynomial(c).real_roots());
  } else {
    // bracket [-R, R] outside which the dominant term fixes the sign
    const int d = shape.degree();
    const double lead = std::abs(lb * shape.coeff(d));
    auto dominated = [&](double R) {
      double rest = 0.0;
      for (int i = 1; i < d; ++i)
        rest += std::abs(lb * shape.coeff(i)) * std::pow(R, i);
      const double power_term = alpha * std::pow(R, p - 1.0);
      if (static_cast<double>(d) > p - 1.0 && lead > 0.0)
        return lead * std::pow(R, d) > 2.0 * (power_term + rest);
      return power_term > 2.0 * (rest + lead * std::pow(R, std::max(d, 0)));
    };
    double R = 1.0;
    while (R < 1e6 && !dominated(R))
      R *= 2.0;
    const int intervals = 200000;
    std::vector<double> roots{0.0};
    auto h = [&](double s) { return constant_equation(alpha, beta, shape, lambda, p, s); };
    double x0 = -R;
    double h0 = h(x0);
    for (int k = 1; k <= intervals; ++k) {
      const double x1 = -R + 2.0 * R * k / intervals;
      const double h1 = h(x1);
      if (h1 == 0.0) {
        roots.push_back(x1);
      } else if (h0 != 0.0 && (h0 < 0.0) != (h1 < 0.0)) {
        double lo = x0, hi = x1, hlo = h0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double hm = h(mid);
          if (hm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((hm < 0.0) == (hlo < 0.0)) {
            lo = mid;
            hlo = hm;
          } else {
            hi = mid;
          }
        }
        roots.push_back(0.5 * (lo + hi));
      }
      x0 = x1;
      h0 = h1;
    }
    report.roots = dedupe(std::move(roots));
  }
  for (double s : report.roots)
    report.max_root_residual =
        std::max(report.max_root_residual, std::abs(constant_equation(alpha, beta, shape, lambda, p, s)));
  return report;
}

double fd_gradient_check(const Problem& problem, const Vector& u, double h) {
  if (!(h > 0.0))
    throw ParameterError("fd_gradient_check: step must be positive");
  const Vector r = problem.residual(u);
  Vector probe = u;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    probe[i] = u[i] + h;
    const double ep = problem.energy(probe);
    probe[i] = u[i] - h;
    const double em = problem.energy(probe);
    probe[i] = u[i];
    const double fd = (ep - em) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - r[i]) / (1.0 + std::abs(r[i])));
  }
  return worst;
}

std::vector<double> symmetric_log_grid(int lo, int hi, int per_decade) {
  if (hi < lo || per_decade < 1)
    throw ParameterError("symmetric_log_grid: need lo <= hi and per_decade >= 1");
  std::vector<double> positive;
  const int count = (hi - lo) * per_decade;
  for (int k = 0; k <= count; ++k)
    positive.push_back(std::pow(10.0, lo + static_cast<double>(k) / per_decade));
  std::vector<double> grid;
  grid.reserve(2 * positive.size());
  for (auto it = positive.rbegin(); it != positive.rend(); ++it)
    grid.push_back(-*it);
  grid.insert(grid.end(), positive.begin(), positive.end());
  return grid;
}

double brute_sup_ratio(const Nonlinearity& f, double p, std::span<const double> grid) {
  if (grid.empty())
    throw ParameterError("brute_sup_ratio: empty grid");
  double best = -std::numeric_limits<double>::infinity();
  for (double xi : grid) {
    if (xi == 0.0)
      throw ParameterError("brute_sup_ratio: grid must exclude 0");
    best = std::max(best, f.integral_primitive(xi) / std::pow(std::abs(xi), p));
  }
  return best;
}

ConstantRatioDiagnostic constant_ratio_diagnostic(const Problem& problem,
                                                  std::span<const double> grid) {
  const auto& inst = problem.instance();
  ConstantRatioDiagnostic out;
  out.sup_ratio = -std::numeric_limits<double>::infinity();
  const auto n = static_cast<Eigen::Index>(problem.size());
  for (double s : grid) {
    if (s == 0.0)
      continue;
    const Vector u = Vector::Constant(n, s);
    const double ratio = problem.j_energy(u, Which::f) / problem.phi_energy(u);
    if (ratio > out.sup_ratio) {
      out.sup_ratio = ratio;
      out.argmax = s;
    }
  }
  out.predicted = inst.p / inst.alpha.integral() * compute_sup_ratio(inst.f, inst.p).value;
  return out;
}

AsymptoticDiagnostic asymptotic_ratio_diagnostic(const Problem& problem,
                                                 const ThresholdReport& thresholds, int samples,
                                                 std::uint64_t seed) {
  const auto& inst = problem.instance();
  AsymptoticDiagnostic out;
  out.samples = samples;
  out.bound = inst.p * std::max({thresholds.rho1, thresholds.rho2, 0.0}) / inst.alpha.inf() + 0.1;
  out.max_ratio_small = -std::numeric_limits<double>::infinity();
  out.max_ratio_large = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> decades(0.0, 3.0);
  for (int k = 0; k < samples; ++k) {
    Vector u = random_smooth_field(problem.mesh(), rng, 1.0);
    const bool small = k % 2 == 0;
    const double target = small ? std::pow(10.0, -3.0 - decades(rng)) : std::pow(10.0, 3.0 + decades(rng));
    u *= target / problem.wnorm(u);
    const double ratio = problem.j_energy(u, Which::f) / problem.phi_energy(u);
    double& slot = small ? out.max_ratio_small : out.max_ratio_large;
    slot = std::max(slot, ratio);
  }
  out.within_bound = out.max_ratio_small <= out.bound && out.max_ratio_large <= out.bound;
  return out;
}

} // namespace trisolve
