#include "trisolve/mesh.hpp"

#include "trisolve/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace trisolve {

Mesh build_box_mesh(int dim, const std::vector<int>& divisions, const std::vector<double>& extents) {
  if (dim != 2 && dim != 3)
    throw ParameterError("mesh dimension must be 2 or 3");
  if (static_cast<int>(divisions.size()) != dim || static_cast<int>(extents.size()) != dim)
    throw ParameterError("mesh divisions and extents must have one entry per dimension");

  Mesh mesh;
  mesh.box.dim = dim;
  for (int k = 0; k < dim; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (divisions[ku] < 1)
      throw ParameterError("mesh divisions must be >= 1");
    if (!(extents[ku] > 0.0))
      throw ParameterError("mesh extents must be positive");
    mesh.divisions[ku] = divisions[ku];
    mesh.box.extents[ku] = extents[ku];
  }

  const int nx = mesh.divisions[0];
  const int ny = mesh.divisions[1];
  const int nz = dim == 3 ? mesh.divisions[2] : 0;
  const std::array<int, 3> stride{1, nx + 1, (nx + 1) * (ny + 1)};

  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        Point x{0.0, 0.0, 0.0};
        // i * h with the last node pinned to the extent
        x[0] = i == nx ? extents[0] : extents[0] * i / nx;
        x[1] = j == ny ? extents[1] : extents[1] * j / ny;
        if (dim == 3)
          x[2] = k == nz ? extents[2] : extents[2] * k / nz;
        mesh.vertices.push_back(x);
      }

  std::array<int, 3> perm{};
  for (int k = 0; k < std::max(nz, 1); ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int base = i * stride[0] + j * stride[1] + (dim == 3 ? k * stride[2] : 0);
        std::iota(perm.begin(), perm.end(), 0);
        do {
          std::array<int, 4> cell{base, -1, -1, -1};
          int idx = base;
          for (int s = 0; s < dim; ++s) {
            idx += stride[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
            cell[static_cast<std::size_t>(s + 1)] = idx;
          }
          mesh.cells.push_back(cell);
        } while (std::next_permutation(perm.begin(), perm.begin() + dim));
      }

  const double factorial = dim == 2 ? 2.0 : 6.0;
  mesh.cell_volume.reserve(mesh.cells.size());
  mesh.grad_bary.reserve(mesh.cells.size());
  for (const auto& cell : mesh.cells) {
    Eigen::Matrix3d edges = Eigen::Matrix3d::Identity();
    const Point& v0 = mesh.vertices[static_cast<std::size_t>(cell[0])];
    for (int s = 0; s < dim; ++s) {
      const Point& vs = mesh.vertices[static_cast<std::size_t>(cell[static_cast<std::size_t>(s + 1)])];
      for (int d = 0; d < dim; ++d)
        edges(d, s) = vs[static_cast<std::size_t>(d)] - v0[static_cast<std::size_t>(d)];
    }
    const double det = edges.determinant();
    mesh.cell_volume.push_back(std::abs(det) / factorial);
    // rows of the inverse edge matrix are the gradients of lambda_1..lambda_dim
    const Eigen::Matrix3d inv = edges.inverse();
    std::array<std::array<double, 3>, 4> grads{};
    for (int s = 0; s < dim; ++s)
      for (int d = 0; d < dim; ++d) {
        grads[static_cast<std::size_t>(s + 1)][static_cast<std::size_t>(d)] = inv(s, d);
        grads[0][static_cast<std::size_t>(d)] -= inv(s, d);
      }
    mesh.grad_bary.push_back(grads);
  }
  return mesh;
}

} // namespace trisolve
