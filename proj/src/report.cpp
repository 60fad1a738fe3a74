#include "sparse_rhc/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "sparse_rhc/errors.hpp"
#include "sparse_rhc/rhc_pod.hpp"

namespace srhc {

namespace fs = std::filesystem;

namespace {

std::ofstream open_csv(const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.precision(6);
  return out;
}

// Commas and newlines would break the table layout.
std::string csv_field(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

const char* model_label(RhcMode mode) {
  switch (mode) {
    case RhcMode::fom:
      return "FE";
    case RhcMode::pod:
      return "POD";
    case RhcMode::uncontrolled:
      return "uncontrolled";
  }
  return "?";
}

}  // namespace

Eigen::VectorXd state_norms(const FemModel& model, const Trajectory& y, NormKind norm) {
  Eigen::VectorXd n(y.grid.num_nodes());
  for (int k = 0; k < n.size(); ++k) {
    n[k] = norm == NormKind::mass ? mass_norm(model, y.values.col(k)) : y.values.col(k).norm();
  }
  return n;
}

double reintegration_error(const FemModel& model, const RhcResult& result, double dt) {
  const FullOrderStepper stepper(model, dt);
  const Trajectory again = resimulate_closed_loop(stepper, result);
  const Eigen::VectorXd w = result.y_rh.grid.trapezoid_weights();
  double num = 0.0, den = 0.0;
  for (int k = 0; k < w.size(); ++k) {
    const double e = mass_norm(model, again.values.col(k) - result.y_rh.values.col(k));
    const double r = mass_norm(model, result.y_rh.values.col(k));
    num += w[k] * e * e;
    den += w[k] * r * r;
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

RunOutcome execute_run(const RunConfig& config, const FemModel& model, std::ostream* log) {
  const Eigen::VectorXd y0 = model.interpolate(benchmark_initial_state);
  RunOutcome out;
  const auto start = std::chrono::steady_clock::now();
  out.result = run_rhc(config.rhc, model, y0, log);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.reintegration = reintegration_error(model, out.result, config.rhc.dt);
  return out;
}

void write_run_outputs(const fs::path& dir, const RunConfig& config, const FemModel& model, const RhcResult& result,
                       double run_seconds, double reintegration) {
  fs::create_directories(dir);
  {
    std::ofstream ini(dir / "config.ini");
    if (!ini) throw std::runtime_error("cannot write " + (dir / "config.ini").string());
    ini << serialize_config(config);
  }
  const TimeGrid& grid = result.y_rh.grid;
  {
    auto out = open_csv(dir / "state_norms.csv");
    out << "t,norm\n";
    const Eigen::VectorXd n = state_norms(model, result.y_rh, config.rhc.norm);
    for (int k = 0; k < n.size(); ++k) out << grid.time(k) << ',' << n[k] << '\n';
  }
  {
    auto out = open_csv(dir / "controls.csv");
    out << 't';
    for (Eigen::Index i = 0; i < result.u_rh.values.rows(); ++i) out << ",u" << i + 1;
    out << '\n';
    for (int k = 0; k < result.u_rh.grid.num_nodes(); ++k) {
      out << result.u_rh.grid.time(k);
      for (Eigen::Index i = 0; i < result.u_rh.values.rows(); ++i) out << ',' << result.u_rh.values(i, k);
      out << '\n';
    }
  }
  {
    auto out = open_csv(dir / "windows.csv");
    out << "window,t_start,objective,iterations,seconds,status,reduced\n";
    for (const auto& w : result.windows) {
      out << w.index << ',' << w.t_start << ',' << w.objective << ',' << w.iterations << ',' << w.seconds << ','
          << to_string(w.status) << ',' << (w.reduced ? 1 : 0) << '\n';
    }
  }
  const bool pod = result.mode == RhcMode::pod;
  {
    auto out = open_csv(dir / "summary.csv");
    const RhcMetrics& m = result.metrics;
    out << "key,value\n";
    out << "mode," << to_string(result.mode) << '\n';
    out << "n_states," << model.num_states() << '\n';
    out << "n_controls," << model.num_controls() << '\n';
    out << "T," << config.rhc.T << '\n';
    out << "T_train," << (pod ? config.rhc.pod.T_train : 0.0) << '\n';
    out << "l2_norm," << m.l2_norm << '\n';
    out << "total_cost," << m.total_cost << '\n';
    out << "terminal_norm," << m.terminal_norm << '\n';
    out << "decay_zeta," << m.decay.zeta << '\n';
    out << "decay_c," << m.decay.c << '\n';
    out << "identically_zero," << (m.decay.identically_zero ? 1 : 0) << '\n';
    out << "windows," << result.windows.size() << '\n';
    out << "unconverged_windows," << result.unconverged_windows() << '\n';
    out << "first_window_seconds," << (result.windows.empty() ? 0.0 : result.windows.front().seconds) << '\n';
    out << "mean_window_seconds," << result.mean_window_seconds(1) << '\n';
    out << "run_seconds," << run_seconds << '\n';
    out << "reintegration_error," << reintegration << '\n';
    if (pod) {
      out << "ell_y," << result.basis_y.ell << '\n';
      out << "ell_p," << result.basis_p.ell << '\n';
    }
  }
  if (pod) {
    auto out = open_csv(dir / "basis_info.csv");
    out << "basis,ell,n_snapshots,sigma_first,sigma_last_kept,sigma_first_dropped,tol,weight,clamped\n";
    auto row = [&](const char* name, const BasisSummary& s, const PodBasis& b) {
      out << name << ',' << s.ell << ',' << s.n_snapshots << ',' << s.sigma_first << ',' << s.sigma_last_kept << ','
          << s.sigma_first_dropped << ',' << b.tol << ',' << to_string(b.weight_id) << ',' << (b.clamped ? 1 : 0)
          << '\n';
    };
    row("state", result.basis_y, result.pod_y);
    row("adjoint", result.basis_p, result.pod_p);
    write_basis_csv((dir / "pod_state").string(), result.pod_y);
    write_basis_csv((dir / "pod_adjoint").string(), result.pod_p);
  }
}

std::vector<NamedConfig> load_config_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".ini") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no .ini files in " + dir.string());
  std::vector<NamedConfig> out;
  for (const auto& f : files) out.push_back({f.stem().string(), load_config(f)});
  return out;
}

BenchmarkReport run_benchmark(const std::vector<NamedConfig>& configs, const fs::path& out_dir, std::ostream* log) {
  if (configs.empty()) throw ConfigError("run_benchmark needs at least one config");
  fs::create_directories(out_dir);
  BenchmarkReport report;
  for (const auto& [name, config] : configs) {
    BenchmarkRow row;
    row.name = name;
    row.mode = config.rhc.mode;
    row.T = config.rhc.T;
    row.T_train = config.rhc.mode == RhcMode::pod ? config.rhc.pod.T_train : 0.0;
    if (log) *log << "bench " << name << " (" << to_string(config.rhc.mode) << ", T=" << config.rhc.T << ")\n";
    try {
      const FemModel model = make_benchmark_model(config.rhc);
      const RunOutcome run = execute_run(config, model, config.verbose ? log : nullptr);
      const RhcResult& r = run.result;
      row.l2_norm = r.metrics.l2_norm;
      row.total_cost = r.metrics.total_cost;
      row.terminal_norm = r.metrics.terminal_norm;
      row.seconds = run.seconds;
      if (!r.windows.empty()) row.first_window_seconds = r.windows.front().seconds;
      row.mean_window_seconds = r.mean_window_seconds(1);
      row.ell_y = r.basis_y.ell;
      row.ell_p = r.basis_p.ell;
      if (r.unconverged_windows() > 0) row.status = "ok (" + std::to_string(r.unconverged_windows()) + " windows unconverged)";
      write_run_outputs(out_dir / name, config, model, r, run.seconds, run.reintegration);
    } catch (const std::exception& e) {
      row.status = std::string("failed: ") + e.what();
      if (log) *log << "  " << row.status << '\n';
    }
    report.rows.push_back(row);
  }
  write_table1(out_dir / "table1.csv", report);
  write_table2(out_dir / "table2.csv", report);
  return report;
}

void write_table1(const fs::path& file, const BenchmarkReport& report) {
  auto out = open_csv(file);
  out << "config,model,T_train,T,l2_norm,total_cost,terminal_norm,seconds,status\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.name) << ',' << model_label(r.mode) << ',';
    if (r.mode == RhcMode::pod) out << r.T_train;
    out << ',';
    if (r.mode != RhcMode::uncontrolled) out << r.T;
    out << ',' << r.l2_norm << ',' << r.total_cost << ',' << r.terminal_norm << ',' << r.seconds << ','
        << csv_field(r.status) << '\n';
  }
}

void write_table2(const fs::path& file, const BenchmarkReport& report) {
  auto out = open_csv(file);
  out << "config,model,T_train,T,first_window_seconds,mean_window_seconds,status\n";
  for (const auto& r : report.rows) {
    if (r.mode == RhcMode::uncontrolled) continue;
    out << csv_field(r.name) << ',' << model_label(r.mode) << ',';
    if (r.mode == RhcMode::pod) out << r.T_train;
    out << ',' << r.T << ',' << r.first_window_seconds << ',' << r.mean_window_seconds << ',' << csv_field(r.status)
        << '\n';
  }
}

}  // namespace srhc
