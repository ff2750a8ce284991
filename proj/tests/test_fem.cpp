#include "test_support.hpp"

#include "trisolve/discrete_io.hpp"
#include "trisolve/errors.hpp"
#include "trisolve/quadrature.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace trisolve;
using tst::base_instance;
using tst::cube_mesh;
using tst::square_mesh;

namespace {

double total_measure(const Mesh& m) {
  return std::accumulate(m.cell_volume.begin(), m.cell_volume.end(), 0.0);
}

// Every interior facet is shared by exactly two cells, every boundary facet by one.
bool conforming(const Mesh& m) {
  std::map<std::vector<int>, int> count;
  const int nv = m.nodes_per_cell();
  for (const auto& cell : m.cells)
    for (int skip = 0; skip < nv; ++skip) {
      std::vector<int> face;
      for (int j = 0; j < nv; ++j)
        if (j != skip)
          face.push_back(cell[static_cast<std::size_t>(j)]);
      std::sort(face.begin(), face.end());
      ++count[face];
    }
  for (const auto& [face, n] : count) {
    if (n > 2)
      return false;
    if (n == 1) {
      // boundary facet: all vertices share a coordinate on a box face
      bool on_face = false;
      for (int d = 0; d < m.dim(); ++d) {
        const auto du = static_cast<std::size_t>(d);
        for (double side : {0.0, m.box.extents[du]}) {
          bool all = true;
          for (int v : face)
            all = all && std::abs(m.vertices[static_cast<std::size_t>(v)][du] - side) < 1e-12;
          on_face = on_face || all;
        }
      }
      if (!on_face)
        return false;
    }
  }
  return true;
}

Problem p3_instance(double lambda) {
  auto mesh = cube_mesh(4);
  const Box box = mesh->box;
  ProblemInstance inst{.mesh = mesh,
                       .alpha = CoefficientField::affine(box, 1.0, {0.5, 0.0, 0.25}),
                       .p = 3.0,
                       .f = Nonlinearity::cubic(CoefficientField::constant(box, 1.0), 1, 1, 1),
                       .g = std::nullopt};
  inst.lambda = lambda;
  inst.eps = 0.0;
  return Problem(inst);
}

} // namespace

TEST_CASE("mesh counts and volumes") {
  auto m1 = build_box_mesh(2, {1, 1}, {1, 1});
  CHECK(m1.n_vertices() == 4);
  CHECK(m1.n_cells() == 2);
  CHECK(total_measure(m1) == doctest::Approx(1.0).epsilon(1e-12));

  auto m32 = build_box_mesh(2, {32, 32}, {1, 1});
  CHECK(m32.n_vertices() == 33 * 33);
  CHECK(m32.n_cells() == 2 * 32 * 32);
  CHECK(m32.n_vertices() == 1089);
  CHECK(m32.n_cells() == 2048);

  auto m4 = build_box_mesh(3, {4, 4, 4}, {1, 1, 1});
  CHECK(m4.n_vertices() == 125);
  CHECK(m4.n_cells() == 384);
  CHECK(total_measure(m4) == doctest::Approx(1.0).epsilon(1e-12));

  auto ma = build_box_mesh(3, {3, 2, 5}, {2.0, 0.5, 1.5});
  CHECK(ma.n_cells() == 6u * 3 * 2 * 5);
  CHECK(std::abs(total_measure(ma) - 1.5) <= 1e-12 * 1.5);
  for (double v : ma.cell_volume)
    CHECK(v > 0.0);
}

TEST_CASE("mesh is conforming and ordered lexicographically") {
  CHECK(conforming(build_box_mesh(2, {3, 4}, {1, 2})));
  CHECK(conforming(build_box_mesh(3, {2, 3, 2}, {1, 1, 1})));
  auto m = build_box_mesh(2, {2, 2}, {1, 1});
  CHECK(m.vertices[1][0] == doctest::Approx(0.5));
  CHECK(m.vertices[1][1] == 0.0);
  CHECK(m.vertices[3][0] == 0.0);
  CHECK(m.vertices[3][1] == doctest::Approx(0.5));
}

TEST_CASE("mesh parameter errors") {
  CHECK_THROWS_AS(build_box_mesh(1, {2}, {1}), ParameterError);
  CHECK_THROWS_AS(build_box_mesh(4, {1, 1, 1, 1}, {1, 1, 1, 1}), ParameterError);
  CHECK_THROWS_AS(build_box_mesh(2, {0, 2}, {1, 1}), ParameterError);
  CHECK_THROWS_AS(build_box_mesh(2, {2, 2}, {0.0, 1}), ParameterError);
  CHECK_THROWS_AS(build_box_mesh(2, {2}, {1, 1}), ParameterError);
}

TEST_CASE("gauss-legendre and simplex rules") {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  for (int k = 0; k <= 9; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      s += w[i] * std::pow(x[i], k);
    CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
  // int over the reference simplex of l0^a l1^b l2^c (l3^d) = a! b! c! d! dim! / (a+b+c+d+dim)!
  auto fact = [](int n) { return std::tgamma(n + 1.0); };
  for (int dim : {2, 3})
    for (int degree : {1, 4, 5, 7}) {
      auto rule = simplex_rule(dim, degree);
      CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) == doctest::Approx(1.0));
      for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + b <= degree; ++b) {
          const int c = degree - a - b;
          double s = 0.0;
          for (std::size_t q = 0; q < rule.size(); ++q)
            s += rule.weights[q] * std::pow(rule.bary[q][0], a) * std::pow(rule.bary[q][1], b) *
                 std::pow(rule.bary[q][2], c);
          const double exact = fact(a) * fact(b) * fact(c) * fact(dim) / fact(a + b + c + dim);
          CHECK(s == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}

TEST_CASE("phi_energy examples") {
  auto mesh = square_mesh(8);
  Problem pr(base_instance(mesh, 0.9));
  CHECK(pr.phi_energy(Vector::Zero(static_cast<Eigen::Index>(pr.size()))) == 0.0);
  const double s = 0.7;
  CHECK(pr.phi_energy(DiscreteFunction::constant(mesh, s).values()) ==
        doctest::Approx(s * s / 2).epsilon(1e-14));
  // nodal interpolant of x1 is exact: (1/2)(1 + 1/3)
  auto x1 = DiscreteFunction::interpolate(mesh, [](const Point& x) { return x[0]; });
  CHECK(pr.phi_energy(x1.values()) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("j_energy examples") {
  auto mesh = square_mesh(4);
  Problem pr(base_instance(mesh, 0.9));
  CHECK(pr.j_energy(Vector::Zero(static_cast<Eigen::Index>(pr.size())), Which::f) == 0.0);
  CHECK(pr.j_energy(DiscreteFunction::constant(mesh, 1.0).values(), Which::f) ==
        doctest::Approx(7.0 / 12.0).epsilon(1e-14));
  const double s = 2.0 / 3.0;
  CHECK(pr.j_energy(DiscreteFunction::constant(mesh, s).values(), Which::f) ==
        doctest::Approx(11.0 / 18.0 * 4.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("j_energy integrates a linear field exactly") {
  // int_0^1 F(x) dx with F = x^2/2 + x^3/3 - x^4/4
  auto mesh = square_mesh(3);
  Problem pr(base_instance(mesh, 0.9));
  auto x1 = DiscreteFunction::interpolate(mesh, [](const Point& x) { return x[0]; });
  CHECK(pr.j_energy(x1.values(), Which::f) ==
        doctest::Approx(1.0 / 6 + 1.0 / 12 - 1.0 / 20).epsilon(1e-14));
}

TEST_CASE("wnorm examples") {
  auto mesh = square_mesh(8);
  Problem pr(base_instance(mesh, 0.9));
  CHECK(pr.wnorm(Vector::Zero(static_cast<Eigen::Index>(pr.size()))) == 0.0);
  CHECK(pr.wnorm(DiscreteFunction::constant(mesh, -0.4).values()) == doctest::Approx(0.4).epsilon(1e-14));
  auto x1 = DiscreteFunction::interpolate(mesh, [](const Point& x) { return x[0]; });
  CHECK(pr.wnorm(x1.values()) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("residual examples") {
  auto mesh = square_mesh(8);
  Problem pr(base_instance(mesh, 0.9));
  CHECK(pr.residual(Vector::Zero(static_cast<Eigen::Index>(pr.size()))).cwiseAbs().maxCoeff() == 0.0);
  const auto [s_lo, s_hi] = tst::base_constant_roots(0.9);
  for (double s : {s_lo, s_hi}) {
    const double scale = 1.0 + std::abs(s);
    CHECK(pr.residual(DiscreteFunction::constant(mesh, s).values()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("constant reproduction: residual components are proportional to the lumped mass") {
  auto mesh = square_mesh(4);
  Problem pr(base_instance(mesh, 0.8));
  const double s = 0.37;
  const Vector r = pr.residual(DiscreteFunction::constant(mesh, s).values());
  const double pointwise = s - 0.8 * (s + s * s - s * s * s);
  const Vector mass = pr.phi_gradient(Vector::Ones(static_cast<Eigen::Index>(pr.size())));
  for (Eigen::Index i = 0; i < r.size(); ++i)
    CHECK(r[i] == doctest::Approx(pointwise * mass[i]).epsilon(1e-13));
  CHECK(mass.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gradient consistency, p = 2, 20 random states") {
  auto mesh = square_mesh(8);
  auto inst = base_instance(mesh, 0.9);
  inst.g = Nonlinearity::analytic(CoefficientField::constant(mesh->box, 1.0), "sin", 1, 1);
  inst.mu = 0.05;
  Problem pr(inst);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vector u = tst::random_vector(pr.size(), rng);
    const double h = 1e-5;
    const Vector r = pr.residual(u);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      Vector up = u, um = u;
      up[i] += h;
      um[i] -= h;
      const double fd = (pr.energy(up) - pr.energy(um)) / (2 * h);
      worst = std::max(worst, std::abs(fd - r[i]) / (1.0 + std::abs(r[i])));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("gradient consistency for p < 2 with regularization") {
  auto mesh = square_mesh(4);
  auto inst = base_instance(mesh, 0.5);
  inst.p = 1.5;
  Problem pr(inst);
  CHECK(pr.eps() == 1e-8);
  std::mt19937_64 rng(4);
  const Vector u = tst::random_vector(pr.size(), rng);
  const Vector r = pr.residual(u);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    Vector up = u, um = u;
    const double h = 1e-6;
    up[i] += h;
    um[i] -= h;
    CHECK(std::abs((pr.energy(up) - pr.energy(um)) / (2 * h) - r[i]) <= 1e-6 * (1 + std::abs(r[i])));
  }
}

TEST_CASE("jacobian: stiffness + mass at p = 2, lambda = mu = 0") {
  auto mesh = square_mesh(6);
  Problem pr(base_instance(mesh, 0.0));
  std::mt19937_64 rng(8);
  const Vector u = tst::random_vector(pr.size(), rng);
  const SparseMatrix J = pr.jacobian(u);
  // linear problem: J u = residual(u), J 1 = mass row sums (stiffness kills constants)
  CHECK((J * u - pr.residual(u)).cwiseAbs().maxCoeff() <= 1e-13);
  const Vector ones = Vector::Ones(static_cast<Eigen::Index>(pr.size()));
  const Vector mass_rows = pr.phi_gradient(ones);
  CHECK((J * ones - mass_rows).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("jacobian symmetry and sparsity") {
  auto mesh = square_mesh(6);
  Problem pr(base_instance(mesh, 0.9));
  std::mt19937_64 rng(9);
  const SparseMatrix J = pr.jacobian(tst::random_vector(pr.size(), rng));
  const SparseMatrix Jt = J.transpose();
  CHECK((J - Jt).norm() <= 1e-12 * J.norm());
  // row nonzeros bounded by vertex adjacency (<= 7 in the 2D Kuhn mesh)
  for (int k = 0; k < J.outerSize(); ++k) {
    int nnz = 0;
    for (SparseMatrix::InnerIterator it(J, k); it; ++it)
      ++nnz;
    CHECK(nnz <= 7);
  }

  Problem p3 = p3_instance(0.7);
  const SparseMatrix J3 = p3.jacobian(tst::random_vector(p3.size(), rng));
  const SparseMatrix J3t = J3.transpose();
  CHECK((J3 - J3t).norm() <= 1e-12 * J3.norm());
}

TEST_CASE("jacobian directional derivative, p = 2") {
  auto mesh = square_mesh(8);
  Problem pr(base_instance(mesh, 0.9));
  std::mt19937_64 rng(10);
  for (int k = 0; k < 5; ++k) {
    const Vector u = tst::random_vector(pr.size(), rng);
    const Vector w = tst::random_vector(pr.size(), rng);
    const double h = 1e-5;
    const Vector fd = (pr.residual(u + h * w) - pr.residual(u - h * w)) / (2 * h);
    const Vector Jw = pr.jacobian(u) * w;
    CHECK((fd - Jw).norm() <= 1e-6 * Jw.norm());
  }
}

TEST_CASE("jacobian directional derivative, p = 3 in 3D") {
  Problem pr = p3_instance(0.7);
  std::mt19937_64 rng(12);
  for (int k = 0; k < 5; ++k) {
    const Vector u = tst::random_vector(pr.size(), rng);
    const Vector w = tst::random_vector(pr.size(), rng);
    const double h = 1e-5;
    const Vector fd = (pr.residual(u + h * w) - pr.residual(u - h * w)) / (2 * h);
    const Vector Jw = pr.jacobian(u) * w;
    CHECK((fd - Jw).norm() <= 1e-4 * Jw.norm());
  }
}

TEST_CASE("phi_energy converges at second order under refinement") {
  auto exact_u = [](const Point& x) { return std::cos(M_PI * x[0]) * std::cos(M_PI * x[1]); };
  // (1/2)(int |grad u|^2 + int u^2) = (1/2)(pi^2/2 + 1/4)
  const double exact = 0.5 * (M_PI * M_PI / 2.0 + 0.25);
  std::vector<double> err;
  for (int n : {8, 16, 32, 64}) {
    auto mesh = square_mesh(n);
    Problem pr(base_instance(mesh, 0.0));
    err.push_back(std::abs(pr.phi_energy(DiscreteFunction::interpolate(mesh, exact_u).values()) - exact));
  }
  for (std::size_t k = 1; k < err.size(); ++k)
    CHECK(std::log2(err[k - 1] / err[k]) >= 1.9);
}

TEST_CASE("assembly is reproducible across thread counts") {
  auto mesh = square_mesh(16);
  auto inst = base_instance(mesh, 0.9);
  Problem serial(inst);
  std::mt19937_64 rng(14);
  const Vector u = tst::random_vector(serial.size(), rng);
  const Vector r1 = serial.residual(u);
  CHECK(serial.residual(u) == r1);
  for (int t : {2, 3, 4}) {
    inst.threads = t;
    Problem par(inst);
    CHECK((par.residual(u) - r1).cwiseAbs().maxCoeff() <= 1e-14 * r1.cwiseAbs().maxCoeff());
    CHECK(std::abs(par.energy(u) - serial.energy(u)) <= 1e-14 * std::abs(serial.energy(u)));
    CHECK((par.jacobian(u) - serial.jacobian(u)).norm() <= 1e-14 * serial.jacobian(u).norm());
    CHECK(par.residual(u) == par.residual(u));
  }
}

TEST_CASE("problem instance validation") {
  auto mesh = square_mesh(2);
  auto inst = base_instance(mesh, 0.9);
  auto bad = inst;
  bad.p = 3.0;
  CHECK_THROWS_AS(Problem{bad}, ParameterError);
  bad = inst;
  bad.lambda = -1.0;
  CHECK_THROWS_AS(Problem{bad}, ParameterError);
  bad = inst;
  bad.mu = -1.0;
  CHECK_THROWS_AS(Problem{bad}, ParameterError);
  bad = inst;
  bad.p = 1.5;
  bad.eps = 0.0;
  CHECK_THROWS_AS(Problem{bad}, ParameterError);
  bad = inst;
  bad.alpha = CoefficientField::constant(mesh->box, 0.0);
  CHECK_THROWS_AS(Problem{bad}, ParameterError);
  Box other = mesh->box;
  other.extents = {2.0, 1.0, 1.0};
  bad = inst;
  bad.alpha = CoefficientField::constant(other, 1.0);
  CHECK_THROWS_AS(Problem{bad}, ParameterError);
  Problem ok(inst);
  CHECK_THROWS_AS(ok.residual(Vector::Zero(3)), ParameterError);
  CHECK_THROWS_AS(DiscreteFunction(mesh, Vector::Zero(3)), ParameterError);
}

TEST_CASE("binary and csv serialization") {
  auto mesh = std::make_shared<const Mesh>(build_box_mesh(3, {2, 3, 1}, {1.0, 2.0, 0.5}));
  auto u = DiscreteFunction::interpolate(mesh, [](const Point& x) { return x[0] - 0.1 * x[1] + x[2] / 3.0; });
  std::stringstream ss;
  write_binary(u, ss);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "TSDF");
  CHECK(bytes.size() == 4 + 4 + 4 + 3 * 4 + 3 * 8 + 8 + 8 * mesh->n_vertices());
  auto v = read_binary(ss);
  CHECK(v.values() == u.values());
  CHECK(v.mesh().n_vertices() == mesh->n_vertices());
  CHECK(v.mesh().box.extents[1] == 2.0);

  std::stringstream bad("XXXX");
  CHECK_THROWS_AS(read_binary(bad), ParameterError);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_binary(truncated), ParameterError);

  std::ostringstream csv;
  write_csv(u, csv);
  std::istringstream lines(csv.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "x,y,z,u");
  CHECK(first == "0,0,0,0");
  int rows = 0;
  for (std::string l; std::getline(lines, l);)
    ++rows;
  CHECK(rows + 1 == static_cast<int>(mesh->n_vertices()));
}
