#include "sparse_rhc/fem_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sparse_rhc/errors.hpp"

namespace srhc {

namespace {

struct Geometry {
  double area;
  std::array<Eigen::Vector2d, 3> grad;
};

Geometry triangle_geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  Geometry g;
  g.area = mesh.signed_area(t);
  for (int a = 0; a < 3; ++a) {
    const Point& pb = mesh.nodes[tri[(a + 1) % 3]];
    const Point& pc = mesh.nodes[tri[(a + 2) % 3]];
    g.grad[a] = Eigen::Vector2d(pb.y - pc.y, pc.x - pb.x) / (2.0 * g.area);
  }
  return g;
}

using Polygon = std::vector<Point>;

// One Sutherland-Hodgman pass against the half-plane sign*(coord - bound) >= 0.
Polygon clip(const Polygon& poly, bool along_x, double bound, double sign) {
  Polygon out;
  if (poly.empty()) return out;
  auto inside = [&](const Point& p) { return sign * ((along_x ? p.x : p.y) - bound) >= 0.0; };
  auto cut = [&](const Point& p, const Point& q) {
    const double pv = along_x ? p.x : p.y;
    const double qv = along_x ? q.x : q.y;
    const double s = (bound - pv) / (qv - pv);
    return Point{p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)};
  };
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point& cur = poly[k];
    const Point& nxt = poly[(k + 1) % poly.size()];
    const bool ci = inside(cur);
    const bool ni = inside(nxt);
    if (ci) out.push_back(cur);
    if (ci != ni) out.push_back(cut(cur, nxt));
  }
  return out;
}

// Area and centroid of a simple polygon (shoelace).
std::pair<double, Point> area_centroid(const Polygon& poly) {
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point& p = poly[k];
    const Point& q = poly[(k + 1) % poly.size()];
    const double cross = p.x * q.y - q.x * p.y;
    a2 += cross;
    cx += (p.x + q.x) * cross;
    cy += (p.y + q.y) * cross;
  }
  if (a2 <= 0.0) return {0.0, {}};
  return {0.5 * a2, {cx / (3.0 * a2), cy / (3.0 * a2)}};
}

}  // namespace

Coefficients Coefficients::benchmark(double nu) {
  Coefficients c;
  c.nu = nu;
  c.reaction = [](double t, Point p) { return -2.0 - 0.8 * std::abs(std::sin(t + p.x)); };
  c.convection = [](double t, Point p) {
    return Eigen::Vector2d(0.1 * std::cos(t) - 0.01 * (p.x + p.y), 0.2 * p.x * p.y * std::cos(t));
  };
  return c;
}

Coefficients Coefficients::diffusion_only(double nu) {
  Coefficients c;
  c.nu = nu;
  c.reaction = [](double, Point) { return 0.0; };
  c.convection = [](double, Point) { return Eigen::Vector2d::Zero().eval(); };
  return c;
}

double benchmark_initial_state(Point p) {
  return 3.0 * std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y);
}

StaticMatrices assemble_static(const Mesh& mesh) {
  const int m = mesh.num_interior();
  std::vector<Eigen::Triplet<double>> mass_entries, stiff_entries;
  mass_entries.reserve(9 * mesh.num_triangles());
  stiff_entries.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Geometry g = triangle_geometry(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      const int row = mesh.full_to_interior[tri[a]];
      if (row < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int col = mesh.full_to_interior[tri[b]];
        if (col < 0) continue;
        mass_entries.emplace_back(row, col, g.area * (a == b ? 2.0 : 1.0) / 12.0);
        stiff_entries.emplace_back(row, col, g.area * g.grad[a].dot(g.grad[b]));
      }
    }
  }
  StaticMatrices out;
  out.mass.resize(m, m);
  out.stiffness.resize(m, m);
  out.mass.setFromTriplets(mass_entries.begin(), mass_entries.end());
  out.stiffness.setFromTriplets(stiff_entries.begin(), stiff_entries.end());
  return out;
}

Eigen::MatrixXd assemble_control_all_nodes(const Mesh& mesh, const ActuatorLayout& layout) {
  layout.validate();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(mesh.num_nodes(), layout.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Geometry g = triangle_geometry(mesh, t);
    const Polygon corners{mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]};
    for (int i = 0; i < layout.size(); ++i) {
      const Rect& r = layout.rectangles[i];
      Polygon poly = clip(corners, true, r.x0, 1.0);
      poly = clip(poly, true, r.x1, -1.0);
      poly = clip(poly, false, r.y0, 1.0);
      poly = clip(poly, false, r.y1, -1.0);
      if (poly.size() < 3) continue;
      const auto [area, c] = area_centroid(poly);
      if (area <= 0.0) continue;
      for (int a = 0; a < 3; ++a) {
        const Point& va = mesh.nodes[tri[a]];
        const double phi = 1.0 + g.grad[a].dot(Eigen::Vector2d(c.x - va.x, c.y - va.y));
        b(tri[a], i) += area * phi;
      }
    }
  }
  return b;
}

Eigen::MatrixXd assemble_control(const Mesh& mesh, const ActuatorLayout& layout) {
  const Eigen::MatrixXd all = assemble_control_all_nodes(mesh, layout);
  Eigen::MatrixXd b(mesh.num_interior(), layout.size());
  for (int j = 0; j < mesh.num_interior(); ++j) b.row(j) = all.row(mesh.interior_to_full[j]);
  return b;
}

FemModel::FemModel(Mesh mesh, Coefficients coefficients, ActuatorLayout layout)
    : mesh_(std::move(mesh)), coefficients_(std::move(coefficients)), layout_(std::move(layout)) {
  if (!coefficients_.reaction || !coefficients_.convection) {
    throw std::invalid_argument("FemModel: coefficient callbacks must be set");
  }
  if (!(coefficients_.nu > 0.0)) throw std::invalid_argument("FemModel: nu must be positive");
  auto statics = assemble_static(mesh_);
  mass_ = std::move(statics.mass);
  stiffness_ = std::move(statics.stiffness);
  mass_.makeCompressed();
  stiffness_.makeCompressed();
  control_ = assemble_control(mesh_, layout_);

  // Value slots into the (shared) compressed pattern of M.
  auto slot = [&](int row, int col) {
    const int* inner = mass_.innerIndexPtr();
    const int begin = mass_.outerIndexPtr()[col];
    const int end = mass_.outerIndexPtr()[col + 1];
    for (int k = begin; k < end; ++k) {
      if (inner[k] == row) return k;
    }
    throw std::logic_error("FemModel: entry missing from mass pattern");
  };
  const int nt = mesh_.num_triangles();
  slots_.resize(nt);
  gradients_.resize(nt);
  areas_.resize(nt);
  centroids_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh_.triangles[t];
    const Geometry g = triangle_geometry(mesh_, t);
    gradients_[t] = g.grad;
    areas_[t] = g.area;
    const Point& p0 = mesh_.nodes[tri[0]];
    const Point& p1 = mesh_.nodes[tri[1]];
    const Point& p2 = mesh_.nodes[tri[2]];
    centroids_[t] = {(p0.x + p1.x + p2.x) / 3.0, (p0.y + p1.y + p2.y) / 3.0};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const int row = mesh_.full_to_interior[tri[a]];
        const int col = mesh_.full_to_interior[tri[b]];
        slots_[t][3 * a + b] = (row < 0 || col < 0) ? -1 : slot(row, col);
      }
    }
  }
  // The stiffness pattern coincides with the mass pattern (same element
  // connectivity), so its value array can be reused slot for slot.
  neg_nu_stiffness_values_ =
      -coefficients_.nu * Eigen::Map<const Eigen::VectorXd>(stiffness_.valuePtr(), stiffness_.nonZeros());
  if (stiffness_.nonZeros() != mass_.nonZeros()) {
    throw std::logic_error("FemModel: mass and stiffness patterns differ");
  }
}

FemModel::LocalCoefficients FemModel::centroid_coefficients(int tri, double t) const {
  const Point c = centroids_[tri];
  LocalCoefficients lc{coefficients_.reaction(t, c), coefficients_.convection(t, c)};
  if (!std::isfinite(lc.a) || !lc.b.allFinite()) {
    throw NumericalError("non-finite coefficient at t=" + std::to_string(t));
  }
  return lc;
}

SparseMatrix FemModel::with_values(const Eigen::VectorXd& values) const {
  SparseMatrix out = mass_;
  Eigen::Map<Eigen::VectorXd>(out.valuePtr(), out.nonZeros()) = values;
  return out;
}

TimeVaryingMatrices FemModel::assemble_timevarying(double t) const {
  Eigen::VectorXd c_vals = Eigen::VectorXd::Zero(mass_.nonZeros());
  Eigen::VectorXd d_vals = Eigen::VectorXd::Zero(mass_.nonZeros());
  for (int tri = 0; tri < mesh_.num_triangles(); ++tri) {
    const LocalCoefficients lc = centroid_coefficients(tri, t);
    const double area = areas_[tri];
    for (int a = 0; a < 3; ++a) {
      const double bgrad = lc.b.dot(gradients_[tri][a]);
      for (int b = 0; b < 3; ++b) {
        const int s = slots_[tri][3 * a + b];
        if (s < 0) continue;
        c_vals[s] += lc.a * area * (a == b ? 2.0 : 1.0) / 12.0;
        d_vals[s] -= area / 3.0 * bgrad;
      }
    }
  }
  return {with_values(c_vals), with_values(d_vals)};
}

SparseMatrix FemModel::system_matrix(double t) const {
  Eigen::VectorXd vals = neg_nu_stiffness_values_;
  for (int tri = 0; tri < mesh_.num_triangles(); ++tri) {
    const LocalCoefficients lc = centroid_coefficients(tri, t);
    const double area = areas_[tri];
    for (int a = 0; a < 3; ++a) {
      const double bgrad = lc.b.dot(gradients_[tri][a]);
      for (int b = 0; b < 3; ++b) {
        const int s = slots_[tri][3 * a + b];
        if (s < 0) continue;
        // -C + (b phi_j, grad phi_i)
        vals[s] += -lc.a * area * (a == b ? 2.0 : 1.0) / 12.0 + area / 3.0 * bgrad;
      }
    }
  }
  return with_values(vals);
}

Eigen::VectorXd FemModel::interpolate(const std::function<double(Point)>& f) const {
  Eigen::VectorXd v(num_states());
  for (int j = 0; j < num_states(); ++j) v[j] = f(mesh_.nodes[mesh_.interior_to_full[j]]);
  return v;
}

}  // namespace srhc
