#pragma once

#include "trisolve/coefficient_field.hpp"
#include "trisolve/mesh.hpp"
#include "trisolve/nonlinearity.hpp"
#include "trisolve/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <optional>

namespace trisolve {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Nodal coefficients of a continuous piecewise-linear function on a mesh.
class DiscreteFunction {
public:
  DiscreteFunction(std::shared_ptr<const Mesh> mesh, Vector values);
  /// Nodal interpolant of a callable u(x).
  template <class F>
  static DiscreteFunction interpolate(std::shared_ptr<const Mesh> mesh, F&& u) {
    Vector v(static_cast<Eigen::Index>(mesh->n_vertices()));
    for (std::size_t i = 0; i < mesh->n_vertices(); ++i)
      v[static_cast<Eigen::Index>(i)] = u(mesh->vertices[i]);
    return DiscreteFunction(std::move(mesh), std::move(v));
  }
  static DiscreteFunction constant(std::shared_ptr<const Mesh> mesh, double s);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }

private:
  std::shared_ptr<const Mesh> mesh_;
  Vector values_;
};

/// The Neumann problem
///
///   -div(|grad u|^{p-2} grad u) + alpha |u|^{p-2} u = lambda f(x, u) + mu g(x, u)
///
/// with the natural boundary condition imposed weakly.
struct ProblemInstance {
  std::shared_ptr<const Mesh> mesh;
  CoefficientField alpha;
  double p = 2.0;
  Nonlinearity f;
  std::optional<Nonlinearity> g;
  double lambda = 0.0;
  double mu = 0.0;
  /// Regularization of |.|^{p-2}; negative selects the default (1e-8 for p < 2, else 0).
  double eps = -1.0;
  /// Worker threads for assembly. Results are deterministic for a fixed count.
  int threads = 1;
};

enum class Which { f, g };

/// Discretized energy functional with cached quadrature data.
///
/// E(u) = Phi(u) - lambda J_f(u) - mu J_g(u), where
/// Phi(u) = (1/p) int [(eps^2 + |grad u|^2)^{p/2} - eps^p] + (1/p) int alpha [(eps^2 + u^2)^{p/2} - eps^p]
/// reduces to (1/p) ||u||^p when eps = 0. residual() is the exact gradient of
/// E for the same quadrature and jacobian() its exact Hessian.
class Problem {
public:
  /// Validates the instance. Throws ParameterError unless 1 < p <= dim and
  /// lambda, mu >= 0, or when eps is invalid or the domains differ.
  explicit Problem(ProblemInstance inst);

  const ProblemInstance& instance() const { return inst_; }
  const Mesh& mesh() const { return *inst_.mesh; }
  double p() const { return inst_.p; }
  double eps() const { return eps_; }
  std::size_t size() const { return mesh().n_vertices(); }

  /// Same mesh and coefficients, different (lambda, mu). Shares cached data.
  Problem with_parameters(double lambda, double mu) const;

  double phi_energy(const Vector& u) const;
  double j_energy(const Vector& u, Which which) const;
  double energy(const Vector& u) const;
  /// (int |grad u|^p + int alpha |u|^p)^{1/p}, unregularized.
  double wnorm(const Vector& u) const;

  Vector residual(const Vector& u) const;
  SparseMatrix jacobian(const Vector& u) const;
  /// Gradient of Phi alone (lambda = mu = 0).
  Vector phi_gradient(const Vector& u) const;

  int quadrature_degree() const { return rule_->degree; }

private:
  struct QuadratureCache {
    std::size_t points_per_cell = 0;
    std::vector<double> weight; // quadrature weight times cell volume
    std::vector<double> alpha;
    std::vector<double> f_spatial;
    std::vector<double> g_spatial;
  };

  enum Terms : unsigned { kPhi = 1u, kF = 2u, kG = 4u };

  double energy_terms(const Vector& u, unsigned terms, double eps) const;
  Vector gradient_terms(const Vector& u, unsigned terms) const;
  void check_size(const Vector& u) const;

  ProblemInstance inst_;
  double eps_ = 0.0;
  std::shared_ptr<const SimplexRule> rule_;
  std::shared_ptr<const QuadratureCache> cache_;
};

} // namespace trisolve
