#include "sparse_rhc/pod.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace srhc {

const char* to_string(PodWeight weight) { return weight == PodWeight::mass ? "mass" : "stiffness"; }

SnapshotSet::SnapshotSet(int rows, PodWeight w) : columns(rows, 0), weights(0), weight_id(w) {}

void SnapshotSet::append(const Eigen::MatrixXd& z, const Eigen::VectorXd& alpha) {
  if (z.cols() != alpha.size()) throw std::invalid_argument("SnapshotSet: one weight per snapshot required");
  if (columns.cols() == 0 && columns.rows() == 0) columns.resize(z.rows(), 0);
  if (z.rows() != columns.rows()) throw std::invalid_argument("SnapshotSet: snapshot length mismatch");
  const Eigen::Index old = columns.cols();
  columns.conservativeResize(Eigen::NoChange, old + z.cols());
  columns.rightCols(z.cols()) = z;
  weights.conservativeResize(old + alpha.size());
  weights.tail(alpha.size()) = alpha;
}

void SnapshotSet::append(const Trajectory& traj) { append(traj.values, traj.grid.trapezoid_weights()); }

void SnapshotSet::validate() const {
  if (columns.cols() != weights.size()) throw std::invalid_argument("SnapshotSet: one weight per snapshot required");
  if (size() < 1) throw std::invalid_argument("SnapshotSet: no snapshots");
  if (!(weights.array() > 0.0).all()) throw std::invalid_argument("SnapshotSet: weights must be positive");
  if (!columns.allFinite()) throw std::invalid_argument("SnapshotSet: non-finite snapshot");
}

WeightFactor::WeightFactor(const SparseMatrix& w) : w_(w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("POD weight matrix must be square");
  const SparseMatrix asym = w - SparseMatrix(w.transpose());
  const double scale = std::max(w.norm(), std::numeric_limits<double>::min());
  if (asym.norm() > 1e-12 * scale) throw std::invalid_argument("POD weight matrix is not symmetric");
  llt_.compute(w);
  if (llt_.info() != Eigen::Success) throw std::invalid_argument("POD weight matrix is not positive definite");
}

Eigen::MatrixXd WeightFactor::apply_lt(const Eigen::MatrixXd& z) const {
  const Eigen::MatrixXd pz = llt_.permutationP() * z;
  return llt_.matrixU() * pz;
}

Eigen::MatrixXd WeightFactor::solve_lt(const Eigen::MatrixXd& z) const {
  const Eigen::MatrixXd x = llt_.matrixU().solve(z);
  return llt_.permutationPinv() * x;
}

int truncation_rank(const Eigen::VectorXd& sigma, double tol, bool* clamped) {
  if (sigma.size() == 0) throw std::invalid_argument("truncation_rank: no singular values");
  const double floor = sigma[0] * static_cast<double>(sigma.size()) * std::numeric_limits<double>::epsilon();
  int rank = 0;
  while (rank < sigma.size() && sigma[rank] > floor) ++rank;
  int ell = 0;
  while (ell < rank && sigma[ell] > tol) ++ell;
  if (clamped) *clamped = ell == 0;
  return std::max(ell, 1);
}

PodBasis compute_pod_basis(const SnapshotSet& snaps, const SparseMatrix& w, double tol, std::ostream* warn) {
  return compute_pod_basis(snaps, WeightFactor(w), tol, warn);
}

PodBasis compute_pod_basis(const SnapshotSet& snaps, const WeightFactor& w, double tol, std::ostream* warn) {
  snaps.validate();
  if (w.matrix().rows() != snaps.rows()) throw std::invalid_argument("POD weight matrix does not match snapshots");
  if (!(tol >= 0.0)) throw std::invalid_argument("POD tolerance must be nonnegative");
  const Eigen::MatrixXd y_hat = w.apply_lt(snaps.columns) * snaps.weights.cwiseSqrt().asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(y_hat, Eigen::ComputeThinU);

  PodBasis basis;
  basis.sigma = svd.singularValues();
  basis.tol = tol;
  basis.weight_id = snaps.weight_id;
  basis.ell = truncation_rank(basis.sigma, tol, &basis.clamped);
  if (basis.clamped && warn) {
    *warn << "warning: pod.tol " << tol << " >= sigma_1 " << basis.sigma[0] << ", keeping one basis vector\n";
  }
  basis.psi = w.solve_lt(svd.matrixU().leftCols(basis.ell));
  return basis;
}

Eigen::MatrixXd project(const PodBasis& basis, const SparseMatrix& w, const Eigen::MatrixXd& z) {
  return basis.psi * (basis.psi.transpose() * (w * z));
}

double reconstruction_error(const SnapshotSet& snaps, const PodBasis& basis, const SparseMatrix& w, int ell) {
  if (ell < 0 || ell > basis.psi.cols()) throw std::invalid_argument("reconstruction_error: ell out of range");
  const auto psi = basis.psi.leftCols(ell);
  const Eigen::MatrixXd wz = w * snaps.columns;
  const Eigen::MatrixXd r = snaps.columns - psi * (psi.transpose() * wz);
  const Eigen::MatrixXd wr = w * r;
  double e = 0.0;
  for (int j = 0; j < snaps.size(); ++j) e += snaps.weights[j] * r.col(j).dot(wr.col(j));
  return e;
}

const SparseMatrix& pod_weight_matrix(const FemModel& model, PodWeight id) {
  return id == PodWeight::mass ? model.mass() : model.stiffness();
}

void write_basis_csv(const std::string& dir, const PodBasis& basis) {
  std::filesystem::create_directories(dir);
  std::ofstream psi(std::filesystem::path(dir) / "psi.csv");
  std::ofstream sigma(std::filesystem::path(dir) / "sigma.csv");
  if (!psi || !sigma) throw std::runtime_error("cannot write basis files in " + dir);
  psi.precision(17);
  sigma.precision(17);
  for (Eigen::Index j = 0; j < basis.psi.cols(); ++j) psi << (j ? "," : "") << "psi" << j + 1;
  psi << '\n';
  for (Eigen::Index i = 0; i < basis.psi.rows(); ++i) {
    for (Eigen::Index j = 0; j < basis.psi.cols(); ++j) psi << (j ? "," : "") << basis.psi(i, j);
    psi << '\n';
  }
  sigma << "i,sigma,kept\n";
  for (Eigen::Index i = 0; i < basis.sigma.size(); ++i) {
    sigma << i + 1 << ',' << basis.sigma[i] << ',' << (i < basis.ell ? 1 : 0) << '\n';
  }
}

}  // namespace srhc
