#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <vector>

#include "sparse_rhc/actuators.hpp"
#include "sparse_rhc/mesh.hpp"

namespace srhc {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Coefficients of  y_t - nu*Lap(y) + a(t,x) y + div(b(t,x) y) = sum_i u_i 1_{R_i}.
struct Coefficients {
  double nu = 0.1;
  std::function<double(double, Point)> reaction;             // a(t,x)
  std::function<Eigen::Vector2d(double, Point)> convection;  // b(t,x)

  /// nu = 0.1, a = -2 - 0.8|sin(t+x1)|,
  /// b = (0.1 cos t - 0.01(x1+x2), 0.2 x1 x2 cos t).
  static Coefficients benchmark(double nu = 0.1);
  /// a = b = 0.
  static Coefficients diffusion_only(double nu);
};

/// 3 sin(pi x1) sin(pi x2).
double benchmark_initial_state(Point p);

struct StaticMatrices {
  SparseMatrix mass;       // M_ij = (phi_j, phi_i)_{L2}
  SparseMatrix stiffness;  // S_ij = (grad phi_j, grad phi_i)_{L2}
};

/// Exact P1 element integrals restricted to the interior unknowns.
StaticMatrices assemble_static(const Mesh& mesh);

/// B(j,i) = \int_{R_i} phi_j over interior nodes j. Each rectangle is clipped
/// against each triangle and the affine basis functions are integrated over
/// the clipped polygon exactly.
Eigen::MatrixXd assemble_control(const Mesh& mesh, const ActuatorLayout& layout);
/// Same as assemble_control but with one row per mesh node, boundary included.
Eigen::MatrixXd assemble_control_all_nodes(const Mesh& mesh, const ActuatorLayout& layout);

struct TimeVaryingMatrices {
  SparseMatrix reaction;    // C(t)_ij = (a(t) phi_j, phi_i)
  SparseMatrix convection;  // D(t)_ij = -(b(t) phi_j, grad phi_i)
};

/// Assembled semidiscretization  M y' = A(t) y + B u  with
/// A(t) = -(nu S + C(t) + D(t)), the Galerkin form of the weak equation
/// (y',phi) + nu(grad y, grad phi) + (a y, phi) - (b y, grad phi) = (Bu, phi).
///
/// C(t) and D(t) use one-point centroid quadrature of the coefficients per
/// triangle; the P1 products are integrated exactly against that constant.
/// Every matrix shares the sparsity pattern of M and is summed triangle by
/// triangle in mesh order, so values are independent of the calling thread.
class FemModel {
 public:
  FemModel(Mesh mesh, Coefficients coefficients, ActuatorLayout layout);

  const Mesh& mesh() const { return mesh_; }
  const Coefficients& coefficients() const { return coefficients_; }
  const ActuatorLayout& layout() const { return layout_; }
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const Eigen::MatrixXd& control() const { return control_; }
  int num_states() const { return mesh_.num_interior(); }
  int num_controls() const { return layout_.size(); }

  /// Throws NumericalError if a coefficient evaluates to a non-finite value.
  TimeVaryingMatrices assemble_timevarying(double t) const;
  SparseMatrix system_matrix(double t) const;

  /// Nodal interpolant on the interior nodes.
  Eigen::VectorXd interpolate(const std::function<double(Point)>& f) const;

 private:
  struct LocalCoefficients {
    double a;
    Eigen::Vector2d b;
  };
  LocalCoefficients centroid_coefficients(int tri, double t) const;
  SparseMatrix with_values(const Eigen::VectorXd& values) const;

  Mesh mesh_;
  Coefficients coefficients_;
  ActuatorLayout layout_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  Eigen::MatrixXd control_;

  // Per triangle: position in the compressed value array of every (row, col)
  // local entry, -1 when either node lies on the boundary.
  std::vector<std::array<int, 9>> slots_;
  std::vector<std::array<Eigen::Vector2d, 3>> gradients_;
  std::vector<double> areas_;
  std::vector<Point> centroids_;
  Eigen::VectorXd neg_nu_stiffness_values_;
};

}  // namespace srhc
