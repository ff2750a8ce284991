// Element loops for the energy, its gradient and Hessian.

#include "trisolve/problem.hpp"

#include <cmath>
#include <thread>
#include <vector>

namespace trisolve {

namespace {

// Runs body(chunk, begin, end) over `threads` contiguous chunks of [0, n).
template <class Body>
void for_each_chunk(std::size_t n, int threads, Body&& body) {
  const auto t = static_cast<std::size_t>(std::max(1, threads));
  if (t == 1 || n < 2 * t) {
    body(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (std::size_t k = 0; k < t; ++k) {
    const std::size_t begin = n * k / t;
    const std::size_t end = n * (k + 1) / t;
    pool.emplace_back([&body, k, begin, end] { body(k, begin, end); });
  }
  for (auto& th : pool)
    th.join();
}

std::size_t chunk_count(std::size_t n, int threads) {
  const auto t = static_cast<std::size_t>(std::max(1, threads));
  return (t == 1 || n < 2 * t) ? 1 : t;
}

// (1/p) [(eps^2 + s2)^{p/2} - eps^p] with an exact p = 2 path
double regularized_power(double s2, double p, double eps) {
  if (p == 2.0)
    return 0.5 * s2;
  if (eps == 0.0)
    return std::pow(s2, 0.5 * p) / p;
  return (std::pow(eps * eps + s2, 0.5 * p) - std::pow(eps, p)) / p;
}

// (eps^2 + s2)^{(p-2)/2}
double flux_coefficient(double s2, double p, double eps) {
  if (p == 2.0)
    return 1.0;
  const double r = eps * eps + s2;
  if (r == 0.0)
    return 0.0; // p > 2 here since eps > 0 whenever p < 2
  return std::pow(r, 0.5 * (p - 2.0));
}

// (p - 2) (eps^2 + s2)^{(p-4)/2}: coefficient of the rank-one tangent term
double rank_one_coefficient(double s2, double p, double eps) {
  if (p == 2.0)
    return 0.0;
  const double r = eps * eps + s2;
  if (r == 0.0)
    return 0.0;
  return (p - 2.0) * std::pow(r, 0.5 * (p - 4.0));
}

struct CellGradient {
  std::array<double, 3> g{};
  double s2 = 0.0;
};

CellGradient cell_gradient(const Mesh& m, std::size_t c, const Vector& u) {
  CellGradient out;
  const auto& cell = m.cells[c];
  const auto& grads = m.grad_bary[c];
  for (int j = 0; j < m.nodes_per_cell(); ++j) {
    const double uj = u[cell[static_cast<std::size_t>(j)]];
    for (int d = 0; d < m.dim(); ++d)
      out.g[static_cast<std::size_t>(d)] += uj * grads[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)];
  }
  for (int d = 0; d < m.dim(); ++d)
    out.s2 += out.g[static_cast<std::size_t>(d)] * out.g[static_cast<std::size_t>(d)];
  return out;
}

double dot(const std::array<double, 3>& a, const std::array<double, 3>& b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d)
    s += a[static_cast<std::size_t>(d)] * b[static_cast<std::size_t>(d)];
  return s;
}

} // namespace

double Problem::energy_terms(const Vector& u, unsigned terms, double eps) const {
  check_size(u);
  const Mesh& m = mesh();
  const QuadratureCache& qc = *cache_;
  const SimplexRule& rule = *rule_;
  const std::size_t nq = qc.points_per_cell;
  const int nv = m.nodes_per_cell();
  const double p = inst_.p;
  const double lambda = inst_.lambda;
  const double mu = inst_.mu;
  const bool use_g = (terms & kG) && inst_.g.has_value();

  std::vector<double> partial(chunk_count(m.n_cells(), inst_.threads), 0.0);
  for_each_chunk(m.n_cells(), inst_.threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t c = begin; c < end; ++c) {
      const auto& cell = m.cells[c];
      if (terms & kPhi)
        acc += m.cell_volume[c] * regularized_power(cell_gradient(m, c, u).s2, p, eps);
      for (std::size_t q = 0; q < nq; ++q) {
        double uq = 0.0;
        for (int j = 0; j < nv; ++j)
          uq += rule.bary[q][static_cast<std::size_t>(j)] * u[cell[static_cast<std::size_t>(j)]];
        const std::size_t idx = c * nq + q;
        double integrand = 0.0;
        if (terms & kPhi)
          integrand += qc.alpha[idx] * regularized_power(uq * uq, p, eps);
        if ((terms & kF) && lambda != 0.0)
          integrand -= lambda * qc.f_spatial[idx] * inst_.f.shape_primitive(uq);
        if (use_g && mu != 0.0)
          integrand -= mu * qc.g_spatial[idx] * inst_.g->shape_primitive(uq);
        acc += qc.weight[idx] * integrand;
      }
    }
    partial[chunk] = acc;
  });
  double total = 0.0;
  for (double v : partial)
    total += v;
  return total;
}

double Problem::phi_energy(const Vector& u) const { return energy_terms(u, kPhi, eps_); }

double Problem::j_energy(const Vector& u, Which which) const {
  // J alone: evaluate with unit parameters on the selected term
  Problem unit = *this;
  unit.inst_.lambda = 1.0;
  unit.inst_.mu = 1.0;
  if (which == Which::g && !inst_.g)
    return 0.0;
  return -unit.energy_terms(u, which == Which::f ? kF : kG, eps_);
}

double Problem::energy(const Vector& u) const { return energy_terms(u, kPhi | kF | kG, eps_); }

double Problem::wnorm(const Vector& u) const {
  const double phi = energy_terms(u, kPhi, 0.0);
  return std::pow(std::max(0.0, inst_.p * phi), 1.0 / inst_.p);
}

Vector Problem::gradient_terms(const Vector& u, unsigned terms) const {
  check_size(u);
  const Mesh& m = mesh();
  const QuadratureCache& qc = *cache_;
  const SimplexRule& rule = *rule_;
  const std::size_t nq = qc.points_per_cell;
  const int nv = m.nodes_per_cell();
  const int dim = m.dim();
  const double p = inst_.p;
  const double eps = eps_;
  const double lambda = (terms & kF) ? inst_.lambda : 0.0;
  const double mu = ((terms & kG) && inst_.g) ? inst_.mu : 0.0;
  const auto n = static_cast<Eigen::Index>(size());

  std::vector<Vector> partial(chunk_count(m.n_cells(), inst_.threads), Vector::Zero(n));
  for_each_chunk(m.n_cells(), inst_.threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Vector& r = partial[chunk];
    for (std::size_t c = begin; c < end; ++c) {
      const auto& cell = m.cells[c];
      const auto& grads = m.grad_bary[c];
      std::array<double, 4> local{};
      if (terms & kPhi) {
        const CellGradient cg = cell_gradient(m, c, u);
        const double a = m.cell_volume[c] * flux_coefficient(cg.s2, p, eps);
        for (int i = 0; i < nv; ++i)
          local[static_cast<std::size_t>(i)] += a * dot(cg.g, grads[static_cast<std::size_t>(i)], dim);
      }
      for (std::size_t q = 0; q < nq; ++q) {
        const auto& b = rule.bary[q];
        double uq = 0.0;
        for (int j = 0; j < nv; ++j)
          uq += b[static_cast<std::size_t>(j)] * u[cell[static_cast<std::size_t>(j)]];
        const std::size_t idx = c * nq + q;
        double s = 0.0;
        if (terms & kPhi)
          s += qc.alpha[idx] * flux_coefficient(uq * uq, p, eps) * uq;
        if (lambda != 0.0)
          s -= lambda * qc.f_spatial[idx] * inst_.f.shape_value(uq);
        if (mu != 0.0)
          s -= mu * qc.g_spatial[idx] * inst_.g->shape_value(uq);
        s *= qc.weight[idx];
        for (int i = 0; i < nv; ++i)
          local[static_cast<std::size_t>(i)] += s * b[static_cast<std::size_t>(i)];
      }
      for (int i = 0; i < nv; ++i)
        r[cell[static_cast<std::size_t>(i)]] += local[static_cast<std::size_t>(i)];
    }
  });
  Vector total = std::move(partial[0]);
  for (std::size_t k = 1; k < partial.size(); ++k)
    total += partial[k];
  return total;
}

Vector Problem::residual(const Vector& u) const { return gradient_terms(u, kPhi | kF | kG); }

Vector Problem::phi_gradient(const Vector& u) const { return gradient_terms(u, kPhi); }

SparseMatrix Problem::jacobian(const Vector& u) const {
  check_size(u);
  const Mesh& m = mesh();
  const QuadratureCache& qc = *cache_;
  const SimplexRule& rule = *rule_;
  const std::size_t nq = qc.points_per_cell;
  const int nv = m.nodes_per_cell();
  const int dim = m.dim();
  const double p = inst_.p;
  const double eps = eps_;
  const double lambda = inst_.lambda;
  const double mu = inst_.g ? inst_.mu : 0.0;

  using Triplet = Eigen::Triplet<double>;
  std::vector<std::vector<Triplet>> partial(chunk_count(m.n_cells(), inst_.threads));
  for_each_chunk(m.n_cells(), inst_.threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto& trips = partial[chunk];
    trips.reserve((end - begin) * static_cast<std::size_t>(nv * nv));
    for (std::size_t c = begin; c < end; ++c) {
      const auto& cell = m.cells[c];
      const auto& grads = m.grad_bary[c];
      std::array<std::array<double, 4>, 4> local{};
      const CellGradient cg = cell_gradient(m, c, u);
      const double vol = m.cell_volume[c];
      const double a = vol * flux_coefficient(cg.s2, p, eps);
      const double b1 = vol * rank_one_coefficient(cg.s2, p, eps);
      std::array<double, 4> gdot{};
      for (int i = 0; i < nv; ++i)
        gdot[static_cast<std::size_t>(i)] = dot(cg.g, grads[static_cast<std::size_t>(i)], dim);
      for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j) {
          const auto iu = static_cast<std::size_t>(i);
          const auto ju = static_cast<std::size_t>(j);
          local[iu][ju] = a * dot(grads[iu], grads[ju], dim) + b1 * gdot[iu] * gdot[ju];
        }
      for (std::size_t q = 0; q < nq; ++q) {
        const auto& bq = rule.bary[q];
        double uq = 0.0;
        for (int j = 0; j < nv; ++j)
          uq += bq[static_cast<std::size_t>(j)] * u[cell[static_cast<std::size_t>(j)]];
        const std::size_t idx = c * nq + q;
        const double u2 = uq * uq;
        // d/du [(eps^2 + u^2)^{(p-2)/2} u]
        double s = qc.alpha[idx] * (flux_coefficient(u2, p, eps) + rank_one_coefficient(u2, p, eps) * u2);
        if (lambda != 0.0)
          s -= lambda * qc.f_spatial[idx] * inst_.f.shape_derivative(uq);
        if (mu != 0.0)
          s -= mu * qc.g_spatial[idx] * inst_.g->shape_derivative(uq);
        s *= qc.weight[idx];
        for (int i = 0; i < nv; ++i)
          for (int j = 0; j < nv; ++j)
            local[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                s * bq[static_cast<std::size_t>(i)] * bq[static_cast<std::size_t>(j)];
      }
      for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j)
          trips.emplace_back(cell[static_cast<std::size_t>(i)], cell[static_cast<std::size_t>(j)],
                             local[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
  });
  std::vector<Triplet> all;
  for (auto& t : partial)
    all.insert(all.end(), t.begin(), t.end());
  const auto n = static_cast<Eigen::Index>(size());
  SparseMatrix jac(n, n);
  jac.setFromTriplets(all.begin(), all.end());
  return jac;
}

} // namespace trisolve
