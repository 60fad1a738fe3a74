#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "sparse_rhc/crank_nicolson.hpp"
#include "sparse_rhc/fbs.hpp"

namespace srhc {

/// Full-order finite-horizon problem on `grid` starting from `y0`.
class FullOrderProblem {
 public:
  using State = Trajectory;
  using Adjoint = Trajectory;

  FullOrderProblem(const FullOrderStepper& stepper, TimeGrid grid, Eigen::VectorXd y0, double beta);

  const TimeGrid& grid() const { return grid_; }
  int num_controls() const { return stepper_.model().num_controls(); }
  double beta() const { return beta_; }
  const Eigen::VectorXd& initial_state() const { return y0_; }

  Trajectory simulate(const Eigen::MatrixXd& u) const { return stepper_.integrate_state(grid_, u, y0_); }
  double smooth_cost(const Trajectory& y) const { return stepper_.smooth_cost(y); }
  Trajectory adjoint(const Trajectory& y) const { return stepper_.integrate_adjoint(y); }
  Eigen::MatrixXd gradient(const Trajectory& p) const { return stepper_.control_gradient(p); }

 private:
  const FullOrderStepper& stepper_;
  TimeGrid grid_;
  Eigen::VectorXd y0_;
  double beta_;
};

static_assert(HorizonProblem<FullOrderProblem>);

struct SmoothGradient {
  Trajectory gradient;  // trapezoid-weighted representative of DF(u)
  Trajectory state;
  Trajectory adjoint;
};

/// y = integrate_state(u), p = integrate_adjoint(y), gradient = B^T p (node-averaged).
SmoothGradient gradient_smooth(const FullOrderStepper& stepper, const TimeGrid& grid, const Eigen::VectorXd& y0,
                               const Eigen::MatrixXd& u);

struct OpenLoopSolution {
  Trajectory u_opt;
  Trajectory y_opt;
  Trajectory p_opt;
  double J_value = 0.0;
  int iterations = 0;
  double fixed_point_residual = 0.0;
  double wall_time = 0.0;
  FbsStatus status = FbsStatus::max_iter;
  std::vector<double> objective_history;
  std::vector<double> envelope_history;
  std::vector<std::pair<Trajectory, Trajectory>> snapshot_log;  // (y, p) per gradient evaluation

  bool converged() const { return status == FbsStatus::converged; }
};

OpenLoopSolution solve_open_loop(const FullOrderStepper& stepper, const TimeGrid& grid, const Eigen::VectorXd& y_init,
                                 const Eigen::MatrixXd& u_init, double beta, const FbsSettings& settings,
                                 bool log_snapshots = false, std::ostream* log = nullptr);

}  // namespace srhc
