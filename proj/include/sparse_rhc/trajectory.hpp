#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>

namespace srhc {

/// Uniform grid t0, t0+dt, ..., t0+n_steps*dt.
struct TimeGrid {
  double t0 = 0.0;
  int n_steps = 0;
  double dt = 0.0;

  int num_nodes() const { return n_steps + 1; }
  double time(int k) const { return t0 + k * dt; }
  double horizon() const { return n_steps * dt; }
  double end() const { return time(n_steps); }
  /// Index of t0 on the global lattice dt*Z.
  long first_node() const;

  /// Trapezoidal quadrature weights (dt/2 at both ends, dt inside).
  Eigen::VectorXd trapezoid_weights() const;

  /// Throws std::invalid_argument unless dt > 0 and n_steps >= 1.
  void validate() const;

  bool operator==(const TimeGrid&) const = default;
};

/// Node-indexed time series: one column per grid node.
struct Trajectory {
  TimeGrid grid;
  Eigen::MatrixXd values;

  Trajectory() = default;
  Trajectory(TimeGrid g, Eigen::MatrixXd v);
  static Trajectory zeros(TimeGrid g, int rows);

  int rows() const { return static_cast<int>(values.rows()); }
  auto column(int k) const { return values.col(k); }
  auto column(int k) { return values.col(k); }
};

/// \sum_k w_k <a_k, b_k> with trapezoidal weights w on the grid.
double weighted_inner(const Eigen::VectorXd& weights, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// CSV: header `t,<prefix>1,...,<prefix>n`, one row per node, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::string& prefix);
void write_trajectory_csv(const std::string& path, const Trajectory& traj, const std::string& prefix);

}  // namespace srhc
