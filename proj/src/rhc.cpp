#include "sparse_rhc/rhc.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sparse_rhc/errors.hpp"
#include "sparse_rhc/open_loop.hpp"

namespace srhc {

namespace {

int integral_ratio(double num, double den, const std::string& what) {
  const double r = num / den;
  const double rounded = std::round(r);
  if (!std::isfinite(r) || rounded < 1.0 || std::abs(r - rounded) > 1e-9 * std::max(1.0, r)) {
    throw ConfigError(what + " not integral");
  }
  return static_cast<int>(rounded);
}

}  // namespace

const char* to_string(RhcMode mode) {
  switch (mode) {
    case RhcMode::fom:
      return "fom";
    case RhcMode::pod:
      return "pod";
    case RhcMode::uncontrolled:
      return "uncontrolled";
  }
  return "unknown";
}

const char* to_string(NormKind norm) { return norm == NormKind::mass ? "mass" : "euclidean"; }

void RhcConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("rhc.dt must be positive");
  if (!(delta > 0.0)) throw ConfigError("rhc.delta must be positive");
  if (!(T >= delta)) throw ConfigError("rhc.T must be >= rhc.delta");
  if (!(T_inf >= delta)) throw ConfigError("rhc.T_inf must be >= rhc.delta");
  if (!(beta > 0.0)) throw ConfigError("rhc.beta must be positive");
  if (!(nu > 0.0)) throw ConfigError("rhc.nu must be positive");
  if (n_side < 2) throw ConfigError("mesh.n_side must be >= 2");
  integral_ratio(delta, dt, "delta/dt");
  integral_ratio(T, dt, "T/dt");
  integral_ratio(T_inf, delta, "T_inf/delta");
  if (mode == RhcMode::pod) {
    if (!(pod.T_train >= delta)) throw ConfigError("pod.T_train must be >= rhc.delta");
    integral_ratio(pod.T_train, dt, "T_train/dt");
    if (!(pod.tol >= 0.0)) throw ConfigError("pod.tol must be nonnegative");
  }
  try {
    layout.validate();
    fbs.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int RhcConfig::steps_per_sample() const { return integral_ratio(delta, dt, "delta/dt"); }
int RhcConfig::horizon_steps() const { return integral_ratio(T, dt, "T/dt"); }
int RhcConfig::training_steps() const { return integral_ratio(pod.T_train, dt, "T_train/dt"); }
int RhcConfig::num_windows() const { return integral_ratio(T_inf, delta, "T_inf/delta"); }

double RhcResult::mean_window_seconds(int first) const {
  if (static_cast<int>(windows.size()) <= first) return 0.0;
  double s = 0.0;
  for (std::size_t k = first; k < windows.size(); ++k) s += windows[k].seconds;
  return s / static_cast<double>(windows.size() - first);
}

int RhcResult::unconverged_windows() const {
  int n = 0;
  for (const auto& w : windows) n += w.status != FbsStatus::converged;
  return n;
}

FemModel make_benchmark_model(const RhcConfig& config) {
  return FemModel(build_mesh(config.n_side), Coefficients::benchmark(config.nu), config.layout);
}

Eigen::MatrixXd shifted_warm_start(const Eigen::MatrixXd& u, int shift, int columns) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(u.rows(), columns);
  const int keep = std::max<int>(0, std::min<int>(columns, static_cast<int>(u.cols()) - shift));
  if (keep > 0) out.leftCols(keep) = u.middleCols(shift, keep);
  return out;
}

namespace detail {

void init_closed_loop(RhcResult& result, const RhcConfig& config, int states, int controls,
                      const Eigen::VectorXd& y0) {
  const TimeGrid global{0.0, config.total_steps(), config.dt};
  result.y_rh = Trajectory::zeros(global, states);
  result.u_rh = Trajectory::zeros(global, controls);
  result.u_segment_end = Eigen::MatrixXd::Zero(controls, config.num_windows());
  result.y_rh.values.col(0) = y0;
}

void store_segment(RhcResult& result, int window, int d, const Eigen::MatrixXd& y_window,
                   const Eigen::MatrixXd& u_window) {
  const int first = window * d;
  result.y_rh.values.middleCols(first, d + 1) = y_window.leftCols(d + 1);
  result.u_rh.values.middleCols(first, d) = u_window.leftCols(d);
  result.u_segment_end.col(window) = u_window.col(d);
  if (first + d == result.u_rh.grid.n_steps) result.u_rh.values.col(first + d) = u_window.col(d);
}

}  // namespace detail

RhcResult run_rhc_fom(const RhcConfig& config, std::ostream* log) {
  config.validate();
  const FemModel model = make_benchmark_model(config);
  return run_rhc_fom(config, model, model.interpolate(benchmark_initial_state), log);
}

RhcResult run_rhc_fom(const RhcConfig& config, const FemModel& model, const Eigen::VectorXd& y0, std::ostream* log) {
  config.validate();
  const FullOrderStepper stepper(model, config.dt);
  const int d = config.steps_per_sample();
  const int n_h = config.horizon_steps();
  const int windows = config.num_windows();

  RhcResult result;
  result.mode = RhcMode::fom;
  detail::init_closed_loop(result, config, model.num_states(), model.num_controls(), y0);

  Eigen::VectorXd y_bar = y0;
  Eigen::MatrixXd u_warm = Eigen::MatrixXd::Zero(model.num_controls(), n_h + 1);
  for (int k = 0; k < windows; ++k) {
    const auto start = std::chrono::steady_clock::now();
    const TimeGrid grid{k * config.delta, n_h, config.dt};
    const OpenLoopSolution sol = solve_open_loop(stepper, grid, y_bar, u_warm, config.beta, config.fbs);
    detail::store_segment(result, k, d, sol.y_opt.values, sol.u_opt.values);
    y_bar = sol.y_opt.values.col(d);
    u_warm = shifted_warm_start(sol.u_opt.values, d, n_h + 1);
    stepper.release_before(grid.first_node() + d);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.windows.push_back({k, grid.t0, sol.J_value, sol.iterations, seconds, sol.status, false});
    if (log) {
      *log << "window " << k << " t0=" << grid.t0 << " J=" << sol.J_value << " iters=" << sol.iterations
           << " status=" << to_string(sol.status) << " |y|_M=" << mass_norm(model, y_bar) << " s=" << seconds
           << std::endl;
    }
  }
  compute_metrics(model, config, result);
  return result;
}

RhcResult run_uncontrolled(const RhcConfig& config) {
  config.validate();
  const FemModel model = make_benchmark_model(config);
  return run_uncontrolled(config, model, model.interpolate(benchmark_initial_state));
}

RhcResult run_uncontrolled(const RhcConfig& config, const FemModel& model, const Eigen::VectorXd& y0) {
  config.validate();
  const FullOrderStepper stepper(model, config.dt);
  RhcResult result;
  result.mode = RhcMode::uncontrolled;
  detail::init_closed_loop(result, config, model.num_states(), model.num_controls(), y0);
  const auto start = std::chrono::steady_clock::now();
  const int n = result.y_rh.grid.n_steps;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.num_controls());
  for (int k = 0; k < n; ++k) {
    result.y_rh.values.col(k + 1) = stepper.propagate(k, result.y_rh.values.col(k), zero, zero);
    stepper.release_before(k + 1);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.windows.push_back({0, 0.0, 0.0, 0, seconds, FbsStatus::converged, false});
  compute_metrics(model, config, result);
  return result;
}

DecayFit fit_decay_rate(const Eigen::VectorXd& times, const Eigen::VectorXd& norms, double t_from) {
  DecayFit fit;
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  int n = 0;
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    if (times[k] < t_from - 1e-12) continue;
    if (!(norms[k] > 0.0)) {
      fit.identically_zero = true;
      return fit;
    }
    const double l = std::log(norms[k]);
    st += times[k];
    sl += l;
    stt += times[k] * times[k];
    stl += times[k] * l;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("fit_decay_rate: fewer than two nodes in the fit window");
  const double slope = (n * stl - st * sl) / (n * stt - st * st);
  const double intercept = (sl - slope * st) / n;
  fit.zeta = -2.0 * slope;
  fit.c = std::exp(intercept);
  return fit;
}

DecayFit fit_decay_rate(const FemModel& model, const Trajectory& y, double t_from) {
  Eigen::VectorXd times(y.grid.num_nodes()), norms(y.grid.num_nodes());
  for (int k = 0; k < y.grid.num_nodes(); ++k) {
    times[k] = y.grid.time(k);
    norms[k] = mass_norm(model, y.values.col(k));
  }
  return fit_decay_rate(times, norms, t_from);
}

Trajectory resimulate_closed_loop(const FullOrderStepper& stepper, const RhcResult& result) {
  const TimeGrid& grid = result.y_rh.grid;
  const int windows = static_cast<int>(result.u_segment_end.cols());
  const int d = grid.n_steps / windows;
  Trajectory y = Trajectory::zeros(grid, result.y_rh.rows());
  y.values.col(0) = result.y_rh.values.col(0);
  for (int k = 0; k < grid.n_steps; ++k) {
    const bool closes_window = (k + 1) % d == 0;
    const Eigen::VectorXd right =
        closes_window ? Eigen::VectorXd(result.u_segment_end.col(k / d)) : Eigen::VectorXd(result.u_rh.values.col(k + 1));
    y.values.col(k + 1) =
        stepper.propagate(grid.first_node() + k, y.values.col(k), result.u_rh.values.col(k), right);
    stepper.release_before(grid.first_node() + k + 1);
  }
  return y;
}

void compute_metrics(const FemModel& model, const RhcConfig& config, RhcResult& result) {
  const Trajectory& y = result.y_rh;
  const Trajectory& u = result.u_rh;
  const int n = y.grid.n_steps;
  const int windows = static_cast<int>(result.u_segment_end.cols());
  const int d = windows > 0 ? n / windows : n;
  const double dt = y.grid.dt;
  const Eigen::VectorXd w = y.grid.trapezoid_weights();

  RhcMetrics& m = result.metrics;
  double l2 = 0.0;
  Eigen::VectorXd state_energy(n + 1);
  for (int k = 0; k <= n; ++k) {
    const auto yk = y.values.col(k);
    const double nk = config.norm == NormKind::mass ? yk.dot(model.mass() * yk) : yk.squaredNorm();
    l2 += w[k] * nk;
    state_energy[k] = yk.dot(model.stiffness() * yk);
  }
  m.l2_norm = std::sqrt(l2);
  m.terminal_norm = mass_norm(model, y.values.col(n));

  auto l1sq = [](const Eigen::VectorXd& v) {
    const double l1 = v.lpNorm<1>();
    return l1 * l1;
  };
  double cost = 0.0;
  for (int k = 0; k < n; ++k) {
    const bool closes_window = windows > 0 && (k + 1) % d == 0;
    const Eigen::VectorXd right = closes_window ? Eigen::VectorXd(result.u_segment_end.col(k / d))
                                                : Eigen::VectorXd(u.values.col(k + 1));
    cost += 0.5 * dt * 0.5 *
            (state_energy[k] + state_energy[k + 1] + config.beta * (l1sq(u.values.col(k)) + l1sq(right)));
  }
  m.total_cost = cost;
  // The fit skips the initial transient; short runs fall back to their second half.
  m.decay = fit_decay_rate(model, y, std::min(1.0, 0.5 * y.grid.end()));
  m.active_counts.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    m.active_counts[k] = static_cast<int>((u.values.col(k).array() != 0.0).count());
  }
}

}  // namespace srhc
