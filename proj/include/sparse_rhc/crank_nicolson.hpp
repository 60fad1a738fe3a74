#pragma once

#include <Eigen/SparseLU>

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>

#include "sparse_rhc/fem_model.hpp"
#include "sparse_rhc/trajectory.hpp"

namespace srhc {

/// Operators of one Crank-Nicolson time node t = node*dt.
struct StepOperators {
  SparseMatrix system;                   // A(t)
  SparseMatrix explicit_part;            // M + dt/2 A(t)
  // M - dt/2 A(t). Mutable only because SparseLU::transpose() is non-const;
  // the transposed solve does not modify the factorization.
  mutable Eigen::SparseLU<SparseMatrix> implicit_lu;
};

struct CostParts {
  double total = 0.0;
  double smooth = 0.0;   // 1/2 trapz(y^T S y)
  double penalty = 0.0;  // beta/2 trapz(|u|_1^2)
};

/// Crank-Nicolson integration of M y' = A(t) y + B u on a fixed step dt,
///
///   (M - dt/2 A_{k+1}) y_{k+1} = (M + dt/2 A_k) y_k + dt/2 B (u_k + u_{k+1}),
///
/// together with its exact algebraic adjoint for the trapezoidal cost
/// 1/2 sum_k w_k y_k^T S y_k. Step operators are factorized once per
/// absolute time node and cached; lookups are safe from several threads.
class FullOrderStepper {
 public:
  FullOrderStepper(const FemModel& model, double dt);

  const FemModel& model() const { return model_; }
  double dt() const { return dt_; }

  /// y0 is the column at grid node 0; `u` has one column per node.
  Trajectory integrate_state(const TimeGrid& grid, const Eigen::MatrixXd& u, const Eigen::VectorXd& y0) const;

  /// One step from absolute node `node` to node+1.
  Eigen::VectorXd step(long node, const Eigen::VectorXd& y, const Eigen::VectorXd& u_left,
                       const Eigen::VectorXd& u_right) const;

  /// Adjoint p with p_n = 0 and, for k = n-1..0,
  ///   (M - dt/2 A_{k+1})^T p_k = (M + dt/2 A_{k+1})^T p_{k+1} + w_{k+1} S y_{k+1}.
  Trajectory integrate_adjoint(const Trajectory& y) const;

  /// Gradient of the smooth cost part with respect to the nodal controls,
  /// represented in the trapezoid-weighted inner product:
  ///   grad_k = B^T (p_{k-1} + p_k) dt / (2 w_k),  p_{-1} = 0.
  Eigen::MatrixXd control_gradient(const Trajectory& p) const;

  /// 1/2 trapz(y^T S y).
  double smooth_cost(const Trajectory& y) const;

  /// Same step as `step` for one-pass integration: the system at node+1 is
  /// solved by defect correction against the factorization of the step
  /// matrix at the centre of its block of kReferenceSpan nodes, down to a
  /// relative residual of 1e-14. Falls back to `step` if the correction stalls.
  Eigen::VectorXd propagate(long node, const Eigen::VectorXd& y, const Eigen::VectorXd& u_left,
                            const Eigen::VectorXd& u_right) const;

  /// Drops cached operators and system matrices of nodes < `node`.
  void release_before(long node) const;
  /// Drops every cached factorization but keeps the system matrices.
  void release_factorizations() const;
  std::size_t cached_nodes() const;

  static constexpr long kReferenceSpan = 40;

  std::shared_ptr<const StepOperators> operators(long node) const;
  /// A(node*dt), cached like the step operators.
  std::shared_ptr<const SparseMatrix> system(long node) const;

 private:
  void check_grid(const TimeGrid& grid) const;
  std::shared_ptr<const Eigen::SparseLU<SparseMatrix>> reference_lu(long node) const;

  const FemModel& model_;
  double dt_;
  mutable std::shared_mutex mutex_;
  mutable std::map<long, std::shared_ptr<const StepOperators>> cache_;
  mutable std::map<long, std::shared_ptr<const SparseMatrix>> systems_;
  mutable std::map<long, std::shared_ptr<const Eigen::SparseLU<SparseMatrix>>> references_;
};

/// Trapezoidal cost parts of a (state, control) pair.
CostParts eval_cost(const FemModel& model, const Trajectory& y, const Trajectory& u, double beta);

/// (beta/2) trapz(|u(t)|_1^2).
double control_penalty(const Eigen::VectorXd& weights, const Eigen::MatrixXd& u, double beta);

double mass_norm(const FemModel& model, const Eigen::VectorXd& y);

}  // namespace srhc
