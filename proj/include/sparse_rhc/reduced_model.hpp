#pragma once

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <shared_mutex>

#include "sparse_rhc/crank_nicolson.hpp"
#include "sparse_rhc/fbs.hpp"
#include "sparse_rhc/pod.hpp"

namespace srhc {

/// Space of the reduced adjoint: the adjoint POD basis (Galerkin projection
/// of the adjoint equation) or the state basis (the exact adjoint of the
/// reduced state scheme).
enum class PodAdjoint { projected, consistent };

const char* to_string(PodAdjoint adjoint);

/// Projected Crank-Nicolson operators of one absolute time node.
struct ReducedStep {
  Eigen::MatrixXd explicit_y;                // Py^T (M + dt/2 A) Py
  Eigen::PartialPivLU<Eigen::MatrixXd> implicit_y;  // Py^T (M - dt/2 A) Py
  Eigen::MatrixXd explicit_p;                // Pp^T (M + dt/2 A) Pp, projected adjoint only
  Eigen::PartialPivLU<Eigen::MatrixXd> implicit_p;
};

/// Galerkin reduction of the full-order scheme onto span(Py) for the state
/// and span(Pp) for the adjoint:
///
///   Ey_{k+1} yh_{k+1} = Ry_k yh_k + dt/2 Py^T B (u_k + u_{k+1}),
///   Ep_{k+1}^T ph_k = Rp_{k+1}^T ph_{k+1} + w_{k+1} Pp^T S Py yh_{k+1},
///
/// with E = M - dt/2 A and R = M + dt/2 A projected per node. Nodes are
/// reduced on first use and cached, so overlapping RHC windows share them.
class ReducedModel {
 public:
  ReducedModel(const FullOrderStepper& stepper, PodBasis basis_y, PodBasis basis_p, PodAdjoint adjoint);

  const FullOrderStepper& stepper() const { return stepper_; }
  const PodBasis& basis_y() const { return basis_y_; }
  const PodBasis& basis_p() const { return basis_p_; }
  PodAdjoint adjoint_mode() const { return adjoint_; }
  int ell_y() const { return basis_y_.ell; }
  int ell_p() const { return static_cast<int>(psi_p().cols()); }
  int num_controls() const { return static_cast<int>(control_y_.cols()); }
  double dt() const { return stepper_.dt(); }

  const Eigen::MatrixXd& mass_y() const { return mass_y_; }
  const Eigen::MatrixXd& stiffness_y() const { return stiffness_y_; }
  const Eigen::MatrixXd& control_y() const { return control_y_; }
  const Eigen::MatrixXd& control_p() const { return control_p_; }

  /// Py^T W y: coefficients of the W-orthogonal projection of y.
  Eigen::VectorXd reduce_state(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd lift_state(const Eigen::MatrixXd& yh) const { return basis_y_.psi * yh; }

  /// Py^T A(t) Py at node*dt.
  Eigen::MatrixXd reduced_system(long node) const;
  std::shared_ptr<const ReducedStep> operators(long node) const;
  void release_before(long node) const;
  std::size_t cached_nodes() const;

  Eigen::MatrixXd integrate_state(const TimeGrid& grid, const Eigen::MatrixXd& u, const Eigen::VectorXd& yh0) const;
  Eigen::MatrixXd integrate_adjoint(const TimeGrid& grid, const Eigen::MatrixXd& yh) const;
  /// Trapezoid-weighted gradient representative, as FullOrderStepper::control_gradient.
  Eigen::MatrixXd control_gradient(const TimeGrid& grid, const Eigen::MatrixXd& ph) const;
  /// 1/2 trapz(|Py yh|_S^2).
  double smooth_cost(const TimeGrid& grid, const Eigen::MatrixXd& yh) const;

 private:
  const Eigen::MatrixXd& psi_p() const {
    return adjoint_ == PodAdjoint::consistent ? basis_y_.psi : basis_p_.psi;
  }

  const FullOrderStepper& stepper_;
  PodBasis basis_y_;
  PodBasis basis_p_;
  PodAdjoint adjoint_;
  // [Py Pp] (Py alone for the consistent adjoint), row-major for the sparse product
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> psi_all_;
  Eigen::MatrixXd w_psi_y_;      // W Py
  Eigen::MatrixXd mass_y_;       // Py^T M Py
  Eigen::MatrixXd stiffness_y_;  // Py^T S Py
  Eigen::MatrixXd mass_p_;       // Pp^T M Pp
  Eigen::MatrixXd coupling_;     // Pp^T S Py
  Eigen::MatrixXd control_y_;    // Py^T B
  Eigen::MatrixXd control_p_;    // Pp^T B
  mutable std::shared_mutex mutex_;
  mutable std::map<long, std::shared_ptr<const ReducedStep>> cache_;
};

/// Reduced finite-horizon problem for solve_fbs.
class ReducedProblem {
 public:
  using State = Eigen::MatrixXd;
  using Adjoint = Eigen::MatrixXd;

  ReducedProblem(const ReducedModel& model, TimeGrid grid, Eigen::VectorXd yh0, double beta);

  const TimeGrid& grid() const { return grid_; }
  int num_controls() const { return model_.num_controls(); }
  double beta() const { return beta_; }

  State simulate(const Eigen::MatrixXd& u) const { return model_.integrate_state(grid_, u, yh0_); }
  double smooth_cost(const State& yh) const { return model_.smooth_cost(grid_, yh); }
  Adjoint adjoint(const State& yh) const { return model_.integrate_adjoint(grid_, yh); }
  Eigen::MatrixXd gradient(const Adjoint& ph) const { return model_.control_gradient(grid_, ph); }

 private:
  const ReducedModel& model_;
  TimeGrid grid_;
  Eigen::VectorXd yh0_;
  double beta_;
};

static_assert(HorizonProblem<ReducedProblem>);

}  // namespace srhc
