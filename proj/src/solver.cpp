#include "trisolve/solver.hpp"

#include "trisolve/errors.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace trisolve {

void SolverConfig::validate() const {
  if (!(newton_tol > 0.0))
    throw ParameterError("solver: newton_tol must be positive");
  if (max_iter < 1)
    throw ParameterError("solver: max_iter must be >= 1");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw ParameterError("solver: backtrack factor must lie in (0, 1)");
  if (!(min_step > 0.0 && min_step <= 1.0))
    throw ParameterError("solver: min_step must lie in (0, 1]");
  if (!(deflation_power >= 1.0))
    throw ParameterError("solver: deflation_power must be >= 1");
  if (!(deflation_shift >= 0.0))
    throw ParameterError("solver: deflation_shift must be nonnegative");
  if (!(distinct_tol > 0.0))
    throw ParameterError("solver: distinct_tol must be positive");
  if (random_guesses < 0)
    throw ParameterError("solver: random_guesses must be nonnegative");
  if (max_solutions < 1)
    throw ParameterError("solver: max_solutions must be >= 1");
}

const char* to_string(Divergence d) {
  switch (d) {
  case Divergence::none:
    return "none";
  case Divergence::singular:
    return "singular";
  case Divergence::stalled:
    return "stalled";
  case Divergence::line_search:
    return "line_search";
  case Divergence::non_finite:
    return "non_finite";
  case Divergence::known_solution:
    return "known_solution";
  }
  return "unknown";
}

double relative_distance(const Problem& problem, const Vector& u, const Vector& v) {
  const double d = problem.wnorm(u - v);
  return d / (1.0 + std::max(problem.wnorm(u), problem.wnorm(v)));
}

bool SolutionSet::add_if_distinct(const Problem& problem, const Vector& u, double residual_norm,
                                  double distinct_tol) {
  for (const Solution& s : solutions_)
    if (relative_distance(problem, u, s.u.values()) <= distinct_tol)
      return false;
  solutions_.push_back(Solution{DiscreteFunction(problem.instance().mesh, u), residual_norm,
                                problem.energy(u), problem.wnorm(u)});
  return true;
}

double SolutionSet::min_pair_distance(const Problem& problem) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < solutions_.size(); ++i)
    for (std::size_t j = i + 1; j < solutions_.size(); ++j)
      best = std::min(best, relative_distance(problem, solutions_[i].u.values(), solutions_[j].u.values()));
  return best;
}

double SolutionSet::max_wnorm() const {
  double m = 0.0;
  for (const Solution& s : solutions_)
    m = std::max(m, s.wnorm);
  return m;
}

std::vector<Vector> SolutionSet::vectors() const {
  std::vector<Vector> out;
  out.reserve(solutions_.size());
  for (const Solution& s : solutions_)
    out.push_back(s.u.values());
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Deflation factor M(u) and the gradient of log M(u).
struct Deflation {
  const Problem& problem;
  std::span<const Vector> known;
  double power;
  double shift;

  // (p Phi_eps(w))^{1/p}, consistent with phi_gradient
  double norm(const Vector& w) const {
    const double p = problem.p();
    return std::pow(std::max(0.0, p * problem.phi_energy(w)), 1.0 / p);
  }

  double factor(const Vector& u) const {
    double m = 1.0;
    for (const Vector& k : known) {
      const double n = norm(u - k);
      m *= (n == 0.0 ? std::numeric_limits<double>::infinity() : std::pow(n, -power)) + shift;
    }
    return m;
  }

  // returns false when u coincides with a known solution
  bool log_gradient(const Vector& u, Vector& out) const {
    out.setZero(u.size());
    const double p = problem.p();
    for (const Vector& k : known) {
      const Vector w = u - k;
      const double n = norm(w);
      if (!(n > 0.0))
        return false;
      // grad ||w|| = Phi'(w) / ||w||^{p-1}
      const Vector grad_norm = problem.phi_gradient(w) / std::pow(n, p - 1.0);
      const double inv = std::pow(n, -power);
      out += (-power * inv / n / (inv + shift)) * grad_norm;
    }
    return true;
  }
};

NewtonResult run_newton(const Problem& problem, std::span<const Vector> known, const Vector& u0,
                        const SolverConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(u0.size()) != problem.size())
    throw ParameterError("initial guess length does not match the mesh");
  const Deflation deflation{problem, known, cfg.deflation_power, cfg.deflation_shift};
  const bool deflated = !known.empty();

  NewtonResult out;
  out.u = u0;
  Vector r = problem.residual(out.u);
  double rnorm = sup_norm(r);
  double merit = deflated ? deflation.factor(out.u) * rnorm : rnorm;
  if (cfg.record_trace)
    out.trace.push_back({0, rnorm, 0.0});

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool pattern_ready = false;
  Vector h(u0.size());

  for (int it = 0;; ++it) {
    out.iterations = it;
    out.residual_norm = rnorm;
    if (!std::isfinite(rnorm) || !out.u.allFinite()) {
      out.reason = Divergence::non_finite;
      return out;
    }
    if (rnorm <= cfg.newton_tol) {
      // one undeflated polishing step, kept only if it lowers the residual
      if (rnorm > 0.0) {
        const SparseMatrix jac = problem.jacobian(out.u);
        if (!pattern_ready) {
          lu.analyzePattern(jac);
          pattern_ready = true;
        }
        lu.factorize(jac);
        if (lu.info() == Eigen::Success) {
          const Vector trial = out.u - lu.solve(r);
          const double tn = trial.allFinite() ? sup_norm(problem.residual(trial)) : kInf;
          if (tn < rnorm) {
            out.u = trial;
            rnorm = tn;
            out.residual_norm = tn;
          }
        }
      }
      for (const Vector& k : known)
        if (relative_distance(problem, out.u, k) <= cfg.distinct_tol) {
          out.reason = Divergence::known_solution;
          return out;
        }
      out.converged = true;
      return out;
    }
    if (it >= cfg.max_iter) {
      out.reason = Divergence::stalled;
      return out;
    }

    const SparseMatrix jac = problem.jacobian(out.u);
    if (!pattern_ready) {
      lu.analyzePattern(jac);
      pattern_ready = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) {
      out.reason = Divergence::singular;
      return out;
    }
    Vector step = -lu.solve(r);
    if (lu.info() != Eigen::Success || !step.allFinite()) {
      out.reason = Divergence::singular;
      return out;
    }
    if (deflated) {
      // Sherman-Morrison on J_M = M (J + r h^T), h = grad log M
      if (!deflation.log_gradient(out.u, h)) {
        out.reason = Divergence::singular;
        return out;
      }
      const double denom = 1.0 - h.dot(step);
      if (!std::isfinite(denom) || std::abs(denom) < 1e-14) {
        out.reason = Divergence::singular;
        return out;
      }
      step /= denom;
    }

    bool accepted = false;
    for (double t = 1.0; t >= cfg.min_step; t *= cfg.backtrack) {
      const Vector trial = out.u + t * step;
      const Vector rt = problem.residual(trial);
      const double rtn = sup_norm(rt);
      const double mt = deflated ? deflation.factor(trial) * rtn : rtn;
      if (std::isfinite(mt) && mt < merit) {
        out.u = trial;
        r = rt;
        rnorm = rtn;
        merit = mt;
        accepted = true;
        if (cfg.record_trace)
          out.trace.push_back({it + 1, rnorm, t});
        break;
      }
    }
    if (!accepted) {
      out.iterations = it + 1;
      out.reason = Divergence::line_search;
      return out;
    }
  }
}

} // namespace

NewtonResult newton_solve(const Problem& problem, const Vector& u0, const SolverConfig& cfg) {
  return run_newton(problem, {}, u0, cfg);
}

NewtonResult deflated_solve(const Problem& problem, std::span<const Vector> known, const Vector& u0,
                            const SolverConfig& cfg) {
  return run_newton(problem, known, u0, cfg);
}

Vector random_smooth_field(const Mesh& mesh, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const int dim = mesh.dim();
  const int modes = dim == 2 ? 9 : 27;
  std::vector<double> a(static_cast<std::size_t>(modes));
  for (double& v : a)
    v = coef(rng);
  Vector u(static_cast<Eigen::Index>(mesh.n_vertices()));
  for (std::size_t i = 0; i < mesh.n_vertices(); ++i) {
    const Point& x = mesh.vertices[i];
    double s = 0.0;
    for (int m = 0; m < modes; ++m) {
      double term = a[static_cast<std::size_t>(m)];
      int rest = m;
      for (int k = 0; k < dim; ++k) {
        const int order = rest % 3;
        rest /= 3;
        const auto ku = static_cast<std::size_t>(k);
        term *= std::cos(order * std::numbers::pi * x[ku] / mesh.box.extents[ku]);
      }
      s += term;
    }
    u[static_cast<Eigen::Index>(i)] = s;
  }
  const double peak = sup_norm(u);
  if (peak > 0.0)
    u *= amplitude / peak;
  return u;
}

std::vector<Vector> default_guesses(const Problem& problem, const SolverConfig& cfg,
                                    std::span<const double> constants) {
  const auto n = static_cast<Eigen::Index>(problem.size());
  std::vector<Vector> guesses;
  guesses.push_back(Vector::Zero(n));
  for (double s : constants)
    guesses.push_back(Vector::Constant(n, s));
  std::mt19937_64 rng(cfg.rng_seed);
  for (int k = 0; k < cfg.random_guesses; ++k)
    guesses.push_back(random_smooth_field(problem.mesh(), rng, 1.0));
  return guesses;
}

SolutionSet find_solutions(const Problem& problem, const SolverConfig& cfg,
                           std::span<const Vector> initial_guesses,
                           std::vector<SolveAttempt>* attempts) {
  cfg.validate();
  SolutionSet set;
  const auto full = [&] { return set.size() >= static_cast<std::size_t>(cfg.max_solutions); };
  bool progress = true;
  while (progress && !full()) {
    progress = false;
    for (std::size_t g = 0; g < initial_guesses.size(); ++g) {
      while (!full()) {
        const std::vector<Vector> known = set.vectors();
        const NewtonResult res = deflated_solve(problem, known, initial_guesses[g], cfg);
        if (attempts)
          attempts->push_back({g, known.size(), res});
        if (!res.converged || !set.add_if_distinct(problem, res.u, res.residual_norm, cfg.distinct_tol))
          break;
        progress = true;
      }
      if (full())
        break;
    }
  }
  return set;
}

ContinuationReport continue_in_mu(const Problem& at_mu0, const SolutionSet& solutions,
                                  std::span<const double> mu_schedule, const SolverConfig& cfg) {
  cfg.validate();
  for (std::size_t i = 1; i < mu_schedule.size(); ++i)
    if (!(mu_schedule[i] > mu_schedule[i - 1]))
      throw ParameterError("mu schedule must be strictly increasing");

  ContinuationReport report;
  report.max_wnorm = solutions.max_wnorm();
  std::vector<Vector> previous = solutions.vectors();
  bool persisting = solutions.size() >= 3;
  const double lambda = at_mu0.instance().lambda;

  for (double mu : mu_schedule) {
    const Problem problem = at_mu0.with_parameters(lambda, mu);
    ContinuationStep step;
    step.mu = mu;
    for (const Vector& warm : previous) {
      const std::vector<Vector> known = step.solutions.vectors();
      const NewtonResult res = deflated_solve(problem, known, warm, cfg);
      if (res.converged)
        step.solutions.add_if_distinct(problem, res.u, res.residual_norm, cfg.distinct_tol);
    }
    if (persisting && step.solutions.size() >= 3) {
      report.mu_hat = mu;
      report.max_wnorm = std::max(report.max_wnorm, step.solutions.max_wnorm());
    } else {
      persisting = false;
    }
    if (!step.solutions.empty())
      previous = step.solutions.vectors();
    report.steps.push_back(std::move(step));
  }
  return report;
}

} // namespace trisolve
