#include "sparse_rhc/open_loop.hpp"

namespace srhc {

FullOrderProblem::FullOrderProblem(const FullOrderStepper& stepper, TimeGrid grid, Eigen::VectorXd y0, double beta)
    : stepper_(stepper), grid_(grid), y0_(std::move(y0)), beta_(beta) {
  grid_.validate();
  if (!(beta_ > 0.0)) throw std::invalid_argument("FullOrderProblem: beta must be positive");
}

SmoothGradient gradient_smooth(const FullOrderStepper& stepper, const TimeGrid& grid, const Eigen::VectorXd& y0,
                               const Eigen::MatrixXd& u) {
  SmoothGradient out;
  out.state = stepper.integrate_state(grid, u, y0);
  out.adjoint = stepper.integrate_adjoint(out.state);
  out.gradient = Trajectory(grid, stepper.control_gradient(out.adjoint));
  return out;
}

OpenLoopSolution solve_open_loop(const FullOrderStepper& stepper, const TimeGrid& grid, const Eigen::VectorXd& y_init,
                                 const Eigen::MatrixXd& u_init, double beta, const FbsSettings& settings,
                                 bool log_snapshots, std::ostream* log) {
  const FullOrderProblem problem(stepper, grid, y_init, beta);
  OpenLoopSolution sol;
  std::function<void(const Trajectory&, const Trajectory&)> observer;
  if (log_snapshots) {
    observer = [&sol](const Trajectory& y, const Trajectory& p) { sol.snapshot_log.emplace_back(y, p); };
  }
  auto r = solve_fbs(problem, u_init, settings, observer, log);
  sol.u_opt = Trajectory(grid, std::move(r.u));
  sol.y_opt = std::move(r.state);
  sol.p_opt = std::move(r.adjoint);
  sol.J_value = r.objective;
  sol.iterations = r.iterations;
  sol.fixed_point_residual = r.fixed_point_residual;
  sol.wall_time = r.wall_time;
  sol.status = r.status;
  sol.objective_history = std::move(r.objective_history);
  sol.envelope_history = std::move(r.envelope_history);
  return sol;
}

}  // namespace srhc
