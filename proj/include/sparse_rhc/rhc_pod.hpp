#pragma once

#include <iosfwd>
#include <string>

#include "sparse_rhc/open_loop.hpp"
#include "sparse_rhc/pod.hpp"
#include "sparse_rhc/rhc.hpp"

namespace srhc {

/// Full-order open-loop solve with POD bases built from its accepted iterates.
struct PodTraining {
  OpenLoopSolution solution;
  SnapshotSet state_snapshots;
  SnapshotSet adjoint_snapshots;
  PodBasis basis_y;
  PodBasis basis_p;
};

/// Solves the full-order problem on `grid` from y0 and builds the state and
/// adjoint bases. Snapshots are the (y, p) trajectories of every accepted
/// iterate; the initial guess is used only if no step was accepted.
PodTraining train_pod(const FullOrderStepper& stepper, const TimeGrid& grid, const Eigen::VectorXd& y0,
                      const Eigen::MatrixXd& u_init, double beta, const FbsSettings& fbs, const PodSettings& pod,
                      std::ostream* log = nullptr);

BasisSummary summarize(const PodBasis& basis, int n_snapshots);

/// Reduced receding horizon loop: window 0 is the full-order training solve
/// on (0, T_train); every later window solves the reduced problem from
/// Py^T W y(t_k) and advances the full-order state over one sampling interval.
RhcResult run_rhc_pod(const RhcConfig& config, std::ostream* log = nullptr);
RhcResult run_rhc_pod(const RhcConfig& config, const FemModel& model, const Eigen::VectorXd& y0,
                      std::ostream* log = nullptr);

/// Dispatch on config.mode.
RhcResult run_rhc(const RhcConfig& config, const FemModel& model, const Eigen::VectorXd& y0,
                  std::ostream* log = nullptr);

/// Node-wise differences between two closed loops on the same grid.
struct ErrorSeries {
  TimeGrid grid;
  Eigen::VectorXd state_error;    // |y_a(t) - y_b(t)|_M
  Eigen::MatrixXd control_error;  // |u_a,i(t) - u_b,i(t)|, one row per actuator

  /// trapz of state_error over the grid.
  double integrated_state_error() const;
};

ErrorSeries rom_error_report(const FemModel& model, const RhcResult& fom, const RhcResult& rom);

/// Fraction of (actuator, node) pairs where both controls are zero or both nonzero.
double zero_pattern_agreement(const Trajectory& u_a, const Trajectory& u_b);

/// rom_state_error.csv (t,error) and rom_control_error.csv (t,e1..eN) in `dir`.
void write_error_csv(const std::string& dir, const ErrorSeries& errors);

}  // namespace srhc
