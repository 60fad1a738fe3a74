#pragma once

#include <array>
#include <vector>

namespace srhc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Uniform triangulation of the unit square. Every cell is split along its
/// (i,j)-(i+1,j+1) diagonal into two right triangles with counter-clockwise
/// vertex order. Boundary nodes carry homogeneous Dirichlet data and are not
/// unknowns.
struct Mesh {
  int n_side = 0;
  std::vector<Point> nodes;                   // (n_side+1)^2, index i + j*(n_side+1)
  std::vector<std::array<int, 3>> triangles;  // full node indices
  std::vector<int> full_to_interior;          // -1 on the boundary
  std::vector<int> interior_to_full;
  double h = 0.0;                             // maximal triangle diameter

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_interior() const { return static_cast<int>(interior_to_full.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  /// Signed area of triangle `t` (positive for every triangle of a built mesh).
  double signed_area(int t) const;
};

/// Throws std::invalid_argument for n_side < 2.
Mesh build_mesh(int n_side);

}  // namespace srhc
