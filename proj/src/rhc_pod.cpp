#include "sparse_rhc/rhc_pod.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "sparse_rhc/errors.hpp"
#include "sparse_rhc/reduced_model.hpp"

namespace srhc {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

PodTraining train_pod(const FullOrderStepper& stepper, const TimeGrid& grid, const Eigen::VectorXd& y0,
                      const Eigen::MatrixXd& u_init, double beta, const FbsSettings& fbs, const PodSettings& pod,
                      std::ostream* log) {
  const FemModel& model = stepper.model();
  const FullOrderProblem problem(stepper, grid, y0, beta);
  PodTraining out{{}, SnapshotSet(model.num_states(), pod.weight), SnapshotSet(model.num_states(), pod.weight), {}, {}};

  const Eigen::VectorXd alpha = grid.trapezoid_weights();
  Trajectory first_y, first_p;
  int calls = 0;
  auto observer = [&](const Trajectory& y, const Trajectory& p) {
    if (calls++ == 0) {
      first_y = y;
      first_p = p;
      return;
    }
    out.state_snapshots.append(y.values, alpha);
    out.adjoint_snapshots.append(p.values, alpha);
  };
  auto r = solve_fbs(problem, u_init, fbs, observer, log);
  if (out.state_snapshots.size() == 0) {
    out.state_snapshots.append(first_y.values, alpha);
    out.adjoint_snapshots.append(first_p.values, alpha);
  }

  const WeightFactor w(pod_weight_matrix(model, pod.weight));
  out.basis_y = compute_pod_basis(out.state_snapshots, w, pod.tol, log);
  if (pod.adjoint == PodAdjoint::projected) {
    out.basis_p = compute_pod_basis(out.adjoint_snapshots, w, pod.tol, log);
  } else {
    out.basis_p = out.basis_y;
  }

  OpenLoopSolution& sol = out.solution;
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
  return out;
}

BasisSummary summarize(const PodBasis& basis, int n_snapshots) {
  BasisSummary s;
  s.ell = basis.ell;
  s.n_snapshots = n_snapshots;
  if (basis.sigma.size() > 0) {
    s.sigma_first = basis.sigma[0];
    s.sigma_last_kept = basis.sigma[basis.ell - 1];
    s.sigma_first_dropped = basis.ell < basis.sigma.size() ? basis.sigma[basis.ell] : 0.0;
  }
  return s;
}

RhcResult run_rhc_pod(const RhcConfig& config, std::ostream* log) {
  config.validate();
  const FemModel model = make_benchmark_model(config);
  return run_rhc_pod(config, model, model.interpolate(benchmark_initial_state), log);
}

RhcResult run_rhc_pod(const RhcConfig& config, const FemModel& model, const Eigen::VectorXd& y0, std::ostream* log) {
  config.validate();
  if (config.mode != RhcMode::pod) throw ConfigError("run_rhc_pod requires rhc.mode = pod");
  const FullOrderStepper stepper(model, config.dt);
  const int d = config.steps_per_sample();
  const int n_h = config.horizon_steps();
  const int n_train = config.training_steps();
  const int windows = config.num_windows();
  const int m = model.num_states();
  const int n_ctrl = model.num_controls();

  RhcResult result;
  result.mode = RhcMode::pod;
  detail::init_closed_loop(result, config, m, n_ctrl, y0);

  Eigen::VectorXd y_bar = y0;
  Eigen::MatrixXd u_warm = Eigen::MatrixXd::Zero(n_ctrl, n_train + 1);
  std::unique_ptr<ReducedModel> rom;
  const int refresh_every = config.pod.refresh ? std::max(1, n_train / d) : 0;

  for (int k = 0; k < windows; ++k) {
    const auto start = std::chrono::steady_clock::now();
    const long first = static_cast<long>(k) * d;
    const bool train = k == 0 || (refresh_every > 0 && k % refresh_every == 0);
    if (train) {
      const TimeGrid grid{k * config.delta, n_train, config.dt};
      const Eigen::MatrixXd init = shifted_warm_start(u_warm, 0, n_train + 1);
      PodTraining tr = train_pod(stepper, grid, y_bar, init, config.beta, config.fbs, config.pod, log);
      const OpenLoopSolution& sol = tr.solution;
      detail::store_segment(result, k, d, sol.y_opt.values, sol.u_opt.values);
      y_bar = sol.y_opt.values.col(d);
      u_warm = shifted_warm_start(sol.u_opt.values, d, n_h + 1);
      result.basis_y = summarize(tr.basis_y, tr.state_snapshots.size());
      result.basis_p = summarize(tr.basis_p, tr.adjoint_snapshots.size());
      result.pod_y = tr.basis_y;
      result.pod_p = tr.basis_p;
      rom.reset();
      rom = std::make_unique<ReducedModel>(stepper, std::move(tr.basis_y), std::move(tr.basis_p), config.pod.adjoint);
      stepper.release_before(first + d);
      stepper.release_factorizations();
      const double seconds = seconds_since(start);
      result.windows.push_back({k, grid.t0, sol.J_value, sol.iterations, seconds, sol.status, false});
      if (log) {
        *log << "window " << k << " t0=" << grid.t0 << " J=" << sol.J_value << " iters=" << sol.iterations
             << " status=" << to_string(sol.status) << " ell_y=" << rom->ell_y() << " ell_p=" << rom->ell_p()
             << " |y|_M=" << mass_norm(model, y_bar) << " s=" << seconds << std::endl;
      }
      continue;
    }

    const TimeGrid grid{k * config.delta, n_h, config.dt};
    FbsResult<ReducedProblem> r;
    try {
      const ReducedProblem problem(*rom, grid, rom->reduce_state(y_bar), config.beta);
      r = solve_fbs(problem, u_warm, config.fbs, {}, nullptr);
    } catch (const NumericalError& e) {
      throw NumericalError("window " + std::to_string(k) + ": " + e.what());
    }

    Eigen::MatrixXd y_window(m, d + 1);
    y_window.col(0) = y_bar;
    for (int j = 0; j < d; ++j) {
      y_window.col(j + 1) = stepper.propagate(first + j, y_window.col(j), r.u.col(j), r.u.col(j + 1));
    }
    detail::store_segment(result, k, d, y_window, r.u);
    y_bar = y_window.col(d);
    u_warm = shifted_warm_start(r.u, d, n_h + 1);
    rom->release_before(first + d);
    stepper.release_before(first + d);
    const double seconds = seconds_since(start);
    result.windows.push_back({k, grid.t0, r.objective, r.iterations, seconds, r.status, true});
    if (log) {
      *log << "window " << k << " t0=" << grid.t0 << " J=" << r.objective << " iters=" << r.iterations
           << " status=" << to_string(r.status) << " |y|_M=" << mass_norm(model, y_bar) << " s=" << seconds
           << std::endl;
    }
  }
  compute_metrics(model, config, result);
  return result;
}

RhcResult run_rhc(const RhcConfig& config, const FemModel& model, const Eigen::VectorXd& y0, std::ostream* log) {
  switch (config.mode) {
    case RhcMode::fom:
      return run_rhc_fom(config, model, y0, log);
    case RhcMode::pod:
      return run_rhc_pod(config, model, y0, log);
    case RhcMode::uncontrolled:
      return run_uncontrolled(config, model, y0);
  }
  throw std::invalid_argument("unknown mode");
}

double ErrorSeries::integrated_state_error() const {
  const Eigen::VectorXd w = grid.trapezoid_weights();
  return w.dot(state_error);
}

ErrorSeries rom_error_report(const FemModel& model, const RhcResult& fom, const RhcResult& rom) {
  if (!(fom.y_rh.grid == rom.y_rh.grid) || !(fom.u_rh.grid == rom.u_rh.grid) ||
      fom.y_rh.values.rows() != rom.y_rh.values.rows() || fom.u_rh.values.rows() != rom.u_rh.values.rows()) {
    throw std::invalid_argument("rom_error_report: closed loops live on different grids");
  }
  ErrorSeries e;
  e.grid = fom.y_rh.grid;
  const int n = e.grid.num_nodes();
  e.state_error.resize(n);
  for (int k = 0; k < n; ++k) e.state_error[k] = mass_norm(model, fom.y_rh.values.col(k) - rom.y_rh.values.col(k));
  e.control_error = (fom.u_rh.values - rom.u_rh.values).cwiseAbs();
  return e;
}

double zero_pattern_agreement(const Trajectory& u_a, const Trajectory& u_b) {
  if (u_a.values.rows() != u_b.values.rows() || u_a.values.cols() != u_b.values.cols()) {
    throw std::invalid_argument("zero_pattern_agreement: shape mismatch");
  }
  const auto za = (u_a.values.array() == 0.0);
  const auto zb = (u_b.values.array() == 0.0);
  const Eigen::Index same = (za == zb).count();
  return static_cast<double>(same) / static_cast<double>(u_a.values.size());
}

void write_error_csv(const std::string& dir, const ErrorSeries& errors) {
  std::filesystem::create_directories(dir);
  std::ofstream s(std::filesystem::path(dir) / "rom_state_error.csv");
  std::ofstream c(std::filesystem::path(dir) / "rom_control_error.csv");
  if (!s || !c) throw std::runtime_error("cannot write error files in " + dir);
  s.precision(6);
  c.precision(6);
  s << "t,error\n";
  c << "t";
  for (Eigen::Index i = 0; i < errors.control_error.rows(); ++i) c << ",e" << i + 1;
  c << '\n';
  for (int k = 0; k < errors.grid.num_nodes(); ++k) {
    s << errors.grid.time(k) << ',' << errors.state_error[k] << '\n';
    c << errors.grid.time(k);
    for (Eigen::Index i = 0; i < errors.control_error.rows(); ++i) c << ',' << errors.control_error(i, k);
    c << '\n';
  }
}

}  // namespace srhc
