#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <iosfwd>
#include <string>

#include "sparse_rhc/fem_model.hpp"
#include "sparse_rhc/trajectory.hpp"

namespace srhc {

/// Spatial inner product of the POD problem.
enum class PodWeight { mass, stiffness };

const char* to_string(PodWeight weight);

/// Snapshots z_j with temporal weights alpha_j.
struct SnapshotSet {
  Eigen::MatrixXd columns;  // m x n_snap
  Eigen::VectorXd weights;  // n_snap, all > 0
  PodWeight weight_id = PodWeight::mass;

  explicit SnapshotSet(int rows = 0, PodWeight w = PodWeight::mass);

  int rows() const { return static_cast<int>(columns.rows()); }
  int size() const { return static_cast<int>(columns.cols()); }

  /// Appends every node of `traj` with its trapezoidal weight.
  void append(const Trajectory& traj);
  void append(const Eigen::MatrixXd& z, const Eigen::VectorXd& alpha);

  /// Throws std::invalid_argument on shape mismatch or nonpositive weights.
  void validate() const;
};

struct PodBasis {
  Eigen::MatrixXd psi;    // m x ell, W-orthonormal
  Eigen::VectorXd sigma;  // all singular values of the weighted snapshot matrix, descending
  int ell = 0;
  double tol = 0.0;
  PodWeight weight_id = PodWeight::mass;
  bool clamped = false;   // tol >= sigma_1, ell forced to 1

  int rows() const { return static_cast<int>(psi.rows()); }
};

/// W = L L^T factor used for the weighted SVD; W is checked for symmetry
/// and positive definiteness.
class WeightFactor {
 public:
  explicit WeightFactor(const SparseMatrix& w);

  const SparseMatrix& matrix() const { return w_; }
  /// L^T z
  Eigen::MatrixXd apply_lt(const Eigen::MatrixXd& z) const;
  /// L^{-T} z
  Eigen::MatrixXd solve_lt(const Eigen::MatrixXd& z) const;

 private:
  SparseMatrix w_;
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
};

/// Smallest ell >= 1 with sigma_{ell+1} <= tol, where singular values below
/// the numerical rank count as zero.
int truncation_rank(const Eigen::VectorXd& sigma, double tol, bool* clamped = nullptr);

/// Y_hat = L^T Y D^{1/2}, thin SVD Y_hat = U S V^T, Psi = L^{-T} U(:, 1:ell).
PodBasis compute_pod_basis(const SnapshotSet& snaps, const SparseMatrix& w, double tol,
                           std::ostream* warn = nullptr);
PodBasis compute_pod_basis(const SnapshotSet& snaps, const WeightFactor& w, double tol,
                           std::ostream* warn = nullptr);

/// Psi Psi^T W z
Eigen::MatrixXd project(const PodBasis& basis, const SparseMatrix& w, const Eigen::MatrixXd& z);

/// sum_j alpha_j |z_j - Psi Psi^T W z_j|_W^2 for the first `ell` basis vectors.
double reconstruction_error(const SnapshotSet& snaps, const PodBasis& basis, const SparseMatrix& w, int ell);

/// Weight matrix of `id` for the model (M or S).
const SparseMatrix& pod_weight_matrix(const FemModel& model, PodWeight id);

/// Writes <dir>/psi.csv (one column per basis vector) and <dir>/sigma.csv.
void write_basis_csv(const std::string& dir, const PodBasis& basis);

}  // namespace srhc
