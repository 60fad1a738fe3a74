#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sparse_rhc/actuators.hpp"
#include "sparse_rhc/crank_nicolson.hpp"
#include "sparse_rhc/fbs.hpp"
#include "sparse_rhc/fem_model.hpp"
#include "sparse_rhc/pod.hpp"
#include "sparse_rhc/reduced_model.hpp"

namespace srhc {

enum class RhcMode { fom, pod, uncontrolled };
enum class NormKind { mass, euclidean };

const char* to_string(RhcMode mode);
const char* to_string(NormKind norm);

struct PodSettings {
  double tol = 1e-4;
  double T_train = 2.0;
  PodWeight weight = PodWeight::mass;
  PodAdjoint adjoint = PodAdjoint::projected;
  bool refresh = false;

  bool operator==(const PodSettings&) const = default;
};

struct RhcConfig {
  double delta = 0.25;
  double T = 2.0;
  double T_inf = 10.0;
  double beta = 5.0;
  double dt = 1.0 / 80.0;
  double nu = 0.1;
  int n_side = 32;
  ActuatorLayout layout = ActuatorLayout::default_layout();
  FbsSettings fbs;
  RhcMode mode = RhcMode::fom;
  PodSettings pod;
  NormKind norm = NormKind::mass;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  int steps_per_sample() const;
  int horizon_steps() const;
  int training_steps() const;
  int num_windows() const;
  int total_steps() const { return num_windows() * steps_per_sample(); }

  bool operator==(const RhcConfig&) const = default;
};

struct WindowStats {
  int index = 0;
  double t_start = 0.0;
  double objective = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  FbsStatus status = FbsStatus::converged;
  bool reduced = false;
};

struct DecayFit {
  double zeta = 0.0;
  double c = 0.0;
  bool identically_zero = false;
  bool stable() const { return !identically_zero && zeta > 0.0; }
};

struct RhcMetrics {
  double l2_norm = 0.0;
  double terminal_norm = 0.0;
  double total_cost = 0.0;
  DecayFit decay;
  std::vector<int> active_counts;  // nonzero control components per node
};

struct BasisSummary {
  int ell = 0;
  int n_snapshots = 0;
  double sigma_first = 0.0;
  double sigma_last_kept = 0.0;
  double sigma_first_dropped = 0.0;
};

/// Closed-loop outcome on the global grid (0, T_inf).
///
/// Controls are continuous and piecewise linear inside each sampling
/// interval but may jump at sampling instants: u_rh holds at node k the
/// value applied on [t_k, t_k+dt], and column j of u_segment_end is the
/// value window j used at its right end t_{j+1}.
struct RhcResult {
  RhcMode mode = RhcMode::fom;
  Trajectory y_rh;
  Trajectory u_rh;
  Eigen::MatrixXd u_segment_end;
  std::vector<WindowStats> windows;
  RhcMetrics metrics;
  BasisSummary basis_y;  // POD runs only
  BasisSummary basis_p;
  PodBasis pod_y;
  PodBasis pod_p;

  double mean_window_seconds(int first = 0) const;
  int unconverged_windows() const;
};

/// The benchmark model on an n_side mesh with the configured layout and nu.
FemModel make_benchmark_model(const RhcConfig& config);

RhcResult run_rhc_fom(const RhcConfig& config, std::ostream* log = nullptr);
RhcResult run_rhc_fom(const RhcConfig& config, const FemModel& model, const Eigen::VectorXd& y0,
                      std::ostream* log = nullptr);

RhcResult run_uncontrolled(const RhcConfig& config);
RhcResult run_uncontrolled(const RhcConfig& config, const FemModel& model, const Eigen::VectorXd& y0);

/// Least-squares fit of log n(t) = log c - (zeta/2) t over t >= t_from.
DecayFit fit_decay_rate(const Eigen::VectorXd& times, const Eigen::VectorXd& norms, double t_from = 1.0);
DecayFit fit_decay_rate(const FemModel& model, const Trajectory& y, double t_from = 1.0);

/// Re-integrates the closed loop over (0, T_inf) from y_rh(0) with the stored controls.
Trajectory resimulate_closed_loop(const FullOrderStepper& stepper, const RhcResult& result);

/// Fills result.metrics from y_rh, u_rh and u_segment_end.
void compute_metrics(const FemModel& model, const RhcConfig& config, RhcResult& result);

/// Control of the next window: `u` delayed by `shift` columns, zero padded
/// or truncated to `columns` columns.
Eigen::MatrixXd shifted_warm_start(const Eigen::MatrixXd& u, int shift, int columns);

}  // namespace srhc

namespace srhc::detail {

/// Allocates the closed-loop containers of `result` for `config`.
void init_closed_loop(RhcResult& result, const RhcConfig& config, int states, int controls,
                      const Eigen::VectorXd& y0);

/// Copies nodes 0..d of a window solution into the closed loop of window `window`.
void store_segment(RhcResult& result, int window, int d, const Eigen::MatrixXd& y_window,
                   const Eigen::MatrixXd& u_window);

}  // namespace srhc::detail
