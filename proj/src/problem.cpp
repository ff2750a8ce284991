#include "trisolve/problem.hpp"

#include "trisolve/errors.hpp"

#include <cmath>

namespace trisolve {

DiscreteFunction::DiscreteFunction(std::shared_ptr<const Mesh> mesh, Vector values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh_)
    throw ParameterError("discrete function needs a mesh");
  if (static_cast<std::size_t>(values_.size()) != mesh_->n_vertices())
    throw ParameterError("discrete function: value count does not match the vertex count");
}

DiscreteFunction DiscreteFunction::constant(std::shared_ptr<const Mesh> mesh, double s) {
  const auto n = static_cast<Eigen::Index>(mesh->n_vertices());
  return DiscreteFunction(std::move(mesh), Vector::Constant(n, s));
}

namespace {

bool same_box(const Box& a, const Box& b) {
  if (a.dim != b.dim)
    return false;
  for (int k = 0; k < a.dim; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (std::abs(a.extents[ku] - b.extents[ku]) > 1e-12 * a.extents[ku])
      return false;
  }
  return true;
}

} // namespace

Problem::Problem(ProblemInstance inst) : inst_(std::move(inst)) {
  if (!inst_.mesh)
    throw ParameterError("problem instance needs a mesh");
  const Mesh& m = *inst_.mesh;
  const double p = inst_.p;
  if (!(p > 1.0) || p > static_cast<double>(m.dim()))
    throw ParameterError("problem instance requires 1 < p <= dim");
  if (!(inst_.lambda >= 0.0))
    throw ParameterError("problem instance requires lambda >= 0");
  if (!(inst_.mu >= 0.0))
    throw ParameterError("problem instance requires mu >= 0");
  if (inst_.threads < 1)
    throw ParameterError("problem instance requires at least one thread");
  if (inst_.eps < 0.0)
    eps_ = p < 2.0 ? 1e-8 : 0.0;
  else
    eps_ = inst_.eps;
  if (eps_ == 0.0 && p < 2.0)
    throw ParameterError("eps = 0 is only allowed for p >= 2");
  inst_.eps = eps_;
  inst_.alpha.require_alpha_role();
  if (!same_box(inst_.alpha.domain(), m.box) || !same_box(inst_.f.spatial().domain(), m.box) ||
      (inst_.g && !same_box(inst_.g->spatial().domain(), m.box)))
    throw ParameterError("coefficient fields and mesh are defined on different boxes");

  int degree = inst_.f.quadrature_degree();
  if (inst_.g)
    degree = std::max(degree, inst_.g->quadrature_degree());
  rule_ = std::make_shared<const SimplexRule>(simplex_rule(m.dim(), degree));

  auto cache = std::make_shared<QuadratureCache>();
  const std::size_t nq = rule_->size();
  const int nv = m.nodes_per_cell();
  cache->points_per_cell = nq;
  const std::size_t total = m.n_cells() * nq;
  cache->weight.resize(total);
  cache->alpha.resize(total);
  cache->f_spatial.resize(total);
  cache->g_spatial.resize(inst_.g ? total : 0);
  for (std::size_t c = 0; c < m.n_cells(); ++c) {
    const auto& cell = m.cells[c];
    for (std::size_t q = 0; q < nq; ++q) {
      Point x{0.0, 0.0, 0.0};
      for (int j = 0; j < nv; ++j) {
        const Point& v = m.vertices[static_cast<std::size_t>(cell[static_cast<std::size_t>(j)])];
        const double b = rule_->bary[q][static_cast<std::size_t>(j)];
        for (int d = 0; d < m.dim(); ++d)
          x[static_cast<std::size_t>(d)] += b * v[static_cast<std::size_t>(d)];
      }
      const std::size_t idx = c * nq + q;
      cache->weight[idx] = rule_->weights[q] * m.cell_volume[c];
      cache->alpha[idx] = inst_.alpha(x);
      cache->f_spatial[idx] = inst_.f.spatial()(x);
      if (inst_.g)
        cache->g_spatial[idx] = inst_.g->spatial()(x);
    }
  }
  cache_ = std::move(cache);
}

Problem Problem::with_parameters(double lambda, double mu) const {
  if (!(lambda >= 0.0) || !(mu >= 0.0))
    throw ParameterError("problem parameters require lambda >= 0 and mu >= 0");
  Problem out = *this;
  out.inst_.lambda = lambda;
  out.inst_.mu = mu;
  return out;
}

void Problem::check_size(const Vector& u) const {
  if (static_cast<std::size_t>(u.size()) != size())
    throw ParameterError("nodal vector length does not match the mesh");
}

} // namespace trisolve
