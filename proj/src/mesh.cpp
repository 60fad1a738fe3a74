#include "sparse_rhc/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace srhc {

double Mesh::signed_area(int t) const {
  const auto& tri = triangles[t];
  const Point& a = nodes[tri[0]];
  const Point& b = nodes[tri[1]];
  const Point& c = nodes[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Mesh build_mesh(int n_side) {
  if (n_side < 2) {
    throw std::invalid_argument("build_mesh: n_side must be >= 2, got " + std::to_string(n_side));
  }
  Mesh mesh;
  mesh.n_side = n_side;
  const int stride = n_side + 1;
  const double spacing = 1.0 / n_side;

  mesh.nodes.reserve(stride * stride);
  mesh.full_to_interior.assign(stride * stride, -1);
  for (int j = 0; j <= n_side; ++j) {
    for (int i = 0; i <= n_side; ++i) {
      mesh.nodes.push_back({i * spacing, j * spacing});
      if (i > 0 && i < n_side && j > 0 && j < n_side) {
        mesh.full_to_interior[i + j * stride] = static_cast<int>(mesh.interior_to_full.size());
        mesh.interior_to_full.push_back(i + j * stride);
      }
    }
  }

  mesh.triangles.reserve(2 * n_side * n_side);
  for (int j = 0; j < n_side; ++j) {
    for (int i = 0; i < n_side; ++i) {
      const int ll = i + j * stride;
      const int lr = ll + 1;
      const int ul = ll + stride;
      const int ur = ul + 1;
      mesh.triangles.push_back({ll, lr, ur});
      mesh.triangles.push_back({ll, ur, ul});
    }
  }
  mesh.h = std::sqrt(2.0) * spacing;
  return mesh;
}

}  // namespace srhc
