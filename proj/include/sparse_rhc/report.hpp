#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparse_rhc/config.hpp"
#include "sparse_rhc/rhc.hpp"

namespace srhc {

/// |y(t_k)| in the selected norm at every closed-loop node.
Eigen::VectorXd state_norms(const FemModel& model, const Trajectory& y, NormKind norm);

/// Relative L2-in-time error between y_rh and a re-integration of the
/// closed loop with the stored controls.
double reintegration_error(const FemModel& model, const RhcResult& result, double dt);

struct RunOutcome {
  RhcResult result;
  double seconds = 0.0;       // closed-loop compute time
  double reintegration = 0.0; // see reintegration_error
};

/// Runs config.rhc on `model` from the benchmark initial state.
RunOutcome execute_run(const RunConfig& config, const FemModel& model, std::ostream* log = nullptr);

/// Writes into `dir`: config.ini, state_norms.csv (t,norm), controls.csv
/// (t,u1..uN), windows.csv, summary.csv (key,value) and, for POD runs,
/// basis_info.csv plus pod_state/ and pod_adjoint/ (psi.csv, sigma.csv).
/// Floating values carry 6 significant digits.
void write_run_outputs(const std::filesystem::path& dir, const RunConfig& config, const FemModel& model,
                       const RhcResult& result, double run_seconds, double reintegration);

struct BenchmarkRow {
  std::string name;  // config file stem
  RhcMode mode = RhcMode::fom;
  double T_train = 0.0;
  double T = 0.0;
  double l2_norm = 0.0;
  double total_cost = 0.0;
  double terminal_norm = 0.0;
  double seconds = 0.0;
  double first_window_seconds = 0.0;
  double mean_window_seconds = 0.0;  // windows k >= 1
  int ell_y = 0;
  int ell_p = 0;
  std::string status = "ok";
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
};

struct NamedConfig {
  std::string name;
  RunConfig config;
};

/// Every *.ini file of `dir`, sorted by file name.
std::vector<NamedConfig> load_config_dir(const std::filesystem::path& dir);

/// Runs every config in order. A failing run becomes a row whose status
/// holds the error message; the remaining configs still run. Per-run
/// outputs go to out_dir/<name>, the tables to out_dir/table1.csv and
/// out_dir/table2.csv.
BenchmarkReport run_benchmark(const std::vector<NamedConfig>& configs, const std::filesystem::path& out_dir,
                              std::ostream* log = nullptr);

/// table1.csv: config,model,T_train,T,l2_norm,total_cost,terminal_norm,seconds,status
void write_table1(const std::filesystem::path& file, const BenchmarkReport& report);
/// table2.csv: config,model,T_train,T,first_window_seconds,mean_window_seconds,status
/// Uncontrolled rows have no optimizer timing and are left out.
void write_table2(const std::filesystem::path& file, const BenchmarkReport& report);

}  // namespace srhc
