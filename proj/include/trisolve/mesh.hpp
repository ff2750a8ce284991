#pragma once

#include "trisolve/coefficient_field.hpp"

#include <array>
#include <vector>

namespace trisolve {

/// Structured simplicial mesh of a box (Kuhn triangulation: 2 triangles per
/// square, 6 tetrahedra per cube). Vertices are numbered lexicographically
/// with the first coordinate running fastest.
struct Mesh {
  Box box;
  std::array<int, 3> divisions{1, 1, 1};
  std::vector<Point> vertices;
  /// First dim + 1 entries are used.
  std::vector<std::array<int, 4>> cells;
  std::vector<double> cell_volume;
  /// Gradient of the barycentric coordinate of each local vertex, per cell.
  std::vector<std::array<std::array<double, 3>, 4>> grad_bary;

  int dim() const { return box.dim; }
  int nodes_per_cell() const { return box.dim + 1; }
  std::size_t n_vertices() const { return vertices.size(); }
  std::size_t n_cells() const { return cells.size(); }
  double volume() const { return box.volume(); }
  /// Grid spacing along the first axis.
  double h() const { return box.extents[0] / divisions[0]; }
};

/// Throws ParameterError for dim outside {2, 3}, divisions < 1, or
/// non-positive extents.
Mesh build_box_mesh(int dim, const std::vector<int>& divisions, const std::vector<double>& extents);

} // namespace trisolve
