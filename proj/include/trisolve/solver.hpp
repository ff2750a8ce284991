#pragma once

#include "trisolve/problem.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace trisolve {

struct SolverConfig {
  /// Convergence threshold on the sup-norm of the (undeflated) residual.
  double newton_tol = 1e-10;
  int max_iter = 100;
  /// Backtracking factor and smallest accepted step length (2^-20).
  double backtrack = 0.5;
  double min_step = 1.0 / 1048576.0;
  double deflation_power = 2.0;
  double deflation_shift = 1.0;
  /// Relative weighted-norm distance below which two solutions coincide.
  double distinct_tol = 1e-4;
  std::uint64_t rng_seed = 1;
  /// Random initial fields added by default_guesses.
  int random_guesses = 16;
  /// Upper bound on the size of a SolutionSet returned by find_solutions.
  int max_solutions = 16;
  bool record_trace = false;

  /// Throws ParameterError on nonpositive tolerances, deflation_power < 1, ...
  void validate() const;
};

enum class Divergence { none, singular, stalled, line_search, non_finite, known_solution };

const char* to_string(Divergence d);

struct TraceEntry {
  int iteration = 0;
  double residual_norm = 0.0;
  double step_length = 0.0;
};

struct NewtonResult {
  bool converged = false;
  Vector u;
  int iterations = 0;
  Divergence reason = Divergence::none;
  /// Sup-norm of the undeflated residual at u.
  double residual_norm = 0.0;
  std::vector<TraceEntry> trace;
};

struct Solution {
  DiscreteFunction u;
  double residual_norm = 0.0;
  double energy = 0.0;
  double wnorm = 0.0;
};

/// Pairwise-distinct certified discrete solutions.
class SolutionSet {
public:
  const std::vector<Solution>& solutions() const { return solutions_; }
  std::size_t size() const { return solutions_.size(); }
  bool empty() const { return solutions_.empty(); }
  const Solution& operator[](std::size_t i) const { return solutions_[i]; }

  /// Adds u when its relative distance to every member exceeds distinct_tol.
  bool add_if_distinct(const Problem& problem, const Vector& u, double residual_norm,
                       double distinct_tol);
  /// Smallest relative distance between two members (+inf for fewer than two).
  double min_pair_distance(const Problem& problem) const;
  double max_wnorm() const;
  std::vector<Vector> vectors() const;

private:
  std::vector<Solution> solutions_;
};

/// ||u - v|| / (1 + max(||u||, ||v||)) in the weighted W^{1,p} norm.
double relative_distance(const Problem& problem, const Vector& u, const Vector& v);

/// Damped Newton iteration. Each accepted step strictly decreases the
/// residual sup-norm.
NewtonResult newton_solve(const Problem& problem, const Vector& u0, const SolverConfig& cfg);

/// Newton iteration on M(u) R(u) with M(u) = prod_k (||u - u_k||^{-power} + shift).
/// A converged result is certified on the raw residual and is never within
/// distinct_tol of a known solution.
NewtonResult deflated_solve(const Problem& problem, std::span<const Vector> known, const Vector& u0,
                            const SolverConfig& cfg);

/// Smooth random field of sup-norm `amplitude`: random cosine modes of order <= 2.
Vector random_smooth_field(const Mesh& mesh, std::mt19937_64& rng, double amplitude = 1.0);

/// u = 0, the given constants, then cfg.random_guesses seeded random fields.
std::vector<Vector> default_guesses(const Problem& problem, const SolverConfig& cfg,
                                    std::span<const double> constants = {});

/// One deflated solve issued by find_solutions (for verbose traces).
struct SolveAttempt {
  std::size_t guess = 0;
  std::size_t known = 0;
  NewtonResult result;
};

/// Greedy multi-start search with deflation: each guess is retried, deflating
/// against everything found so far, until a full pass adds nothing.
SolutionSet find_solutions(const Problem& problem, const SolverConfig& cfg,
                           std::span<const Vector> initial_guesses,
                           std::vector<SolveAttempt>* attempts = nullptr);

struct ContinuationStep {
  double mu = 0.0;
  SolutionSet solutions;
};

struct ContinuationReport {
  std::vector<ContinuationStep> steps;
  /// Largest schedule value such that >= 3 solutions were found at every
  /// schedule value up to it; 0 when the first value already fails.
  double mu_hat = 0.0;
  /// Max weighted norm over the mu = 0 set and all steps with mu <= mu_hat.
  double max_wnorm = 0.0;
};

/// Warm-started re-solve along an increasing mu schedule.
ContinuationReport continue_in_mu(const Problem& at_mu0, const SolutionSet& solutions,
                                  std::span<const double> mu_schedule, const SolverConfig& cfg);

} // namespace trisolve
