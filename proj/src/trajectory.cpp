#include "sparse_rhc/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace srhc {

long TimeGrid::first_node() const { return std::lround(t0 / dt); }

Eigen::VectorXd TimeGrid::trapezoid_weights() const {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(num_nodes(), dt);
  w[0] = 0.5 * dt;
  w[n_steps] = 0.5 * dt;
  return w;
}

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be positive");
  if (n_steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
}

Trajectory::Trajectory(TimeGrid g, Eigen::MatrixXd v) : grid(g), values(std::move(v)) {
  if (values.cols() != grid.num_nodes()) {
    throw std::invalid_argument("Trajectory: column count must equal n_steps+1");
  }
}

Trajectory Trajectory::zeros(TimeGrid g, int rows) {
  return Trajectory(g, Eigen::MatrixXd::Zero(rows, g.num_nodes()));
}

double weighted_inner(const Eigen::VectorXd& weights, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) s += weights[k] * a.col(k).dot(b.col(k));
  return s;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::string& prefix) {
  os << "t";
  for (int i = 0; i < traj.rows(); ++i) os << ',' << prefix << (i + 1);
  os << '\n' << std::setprecision(17);
  for (int k = 0; k < traj.grid.num_nodes(); ++k) {
    os << traj.grid.time(k);
    for (int i = 0; i < traj.rows(); ++i) os << ',' << traj.values(i, k);
    os << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj, const std::string& prefix) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_trajectory_csv(os, traj, prefix);
}

}  // namespace srhc
