#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "sparse_rhc/errors.hpp"
#include "sparse_rhc/report.hpp"
#include "support.hpp"

using namespace srhc;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::map<std::string, std::string> summary(const fs::path& file) {
  std::map<std::string, std::string> out;
  for (const auto& l : lines(file)) {
    const auto comma = l.find(',');
    out[l.substr(0, comma)] = l.substr(comma + 1);
  }
  return out;
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) { fs::remove_all(path_); }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

RunConfig small_run(RhcMode mode, double T_inf = 0.5) {
  RunConfig c;
  c.rhc = srhc::testing::small_config(mode, 4, 0.5, T_inf);
  return c;
}

}  // namespace

TEST(Report, StateNorms) {
  const RunConfig c = small_run(RhcMode::uncontrolled);
  const FemModel model = make_benchmark_model(c.rhc);
  const RunOutcome run = execute_run(c, model);
  const Eigen::VectorXd mass = state_norms(model, run.result.y_rh, NormKind::mass);
  const Eigen::VectorXd eu = state_norms(model, run.result.y_rh, NormKind::euclidean);
  EXPECT_NEAR(mass[0], mass_norm(model, run.result.y_rh.values.col(0)), 1e-15);
  EXPECT_NEAR(eu[3], run.result.y_rh.values.col(3).norm(), 1e-15);
  EXPECT_LE(run.reintegration, 1e-10);
}

TEST(Report, RunOutputFiles) {
  TempDir dir("srhc_run_outputs");
  RunConfig c = small_run(RhcMode::pod);
  const FemModel model = make_benchmark_model(c.rhc);
  const RunOutcome run = execute_run(c, model);
  write_run_outputs(dir.path(), c, model, run.result, run.seconds, run.reintegration);
  for (const char* f : {"config.ini", "state_norms.csv", "controls.csv", "windows.csv", "summary.csv",
                        "basis_info.csv", "pod_state/psi.csv", "pod_adjoint/sigma.csv"}) {
    EXPECT_TRUE(fs::exists(dir.path() / f)) << f;
  }
  EXPECT_EQ(load_config(dir.path() / "config.ini"), c);
  const auto norms = lines(dir.path() / "state_norms.csv");
  EXPECT_EQ(norms.front(), "t,norm");
  EXPECT_EQ(norms.size(), 42u);
  EXPECT_EQ(lines(dir.path() / "controls.csv").front(), "t,u1,u2,u3,u4,u5,u6,u7,u8,u9,u10,u11,u12,u13");
  EXPECT_EQ(lines(dir.path() / "windows.csv").front(), "window,t_start,objective,iterations,seconds,status,reduced");
  EXPECT_EQ(lines(dir.path() / "windows.csv").size(), 3u);
  const auto s = summary(dir.path() / "summary.csv");
  EXPECT_EQ(s.at("mode"), "pod");
  EXPECT_EQ(s.at("n_states"), "9");
  EXPECT_EQ(s.at("windows"), "2");
  EXPECT_EQ(std::stoi(s.at("ell_y")), run.result.basis_y.ell);
  EXPECT_LE(std::stod(s.at("reintegration_error")), 1e-10);
}

TEST(Report, BenchmarkTables) {
  TempDir dir("srhc_bench_tables");
  std::vector<NamedConfig> configs{{"a_unc", small_run(RhcMode::uncontrolled)}, {"b_fom", small_run(RhcMode::fom)}};
  configs.push_back({"c_bad", small_run(RhcMode::fom)});
  configs.back().config.rhc.delta = 0.33;
  const BenchmarkReport report = run_benchmark(configs, dir.path());
  ASSERT_EQ(report.rows.size(), 3u);
  EXPECT_EQ(report.rows[0].status, "ok");
  EXPECT_EQ(report.rows[1].status, "ok");
  EXPECT_EQ(report.rows[2].status.rfind("failed: ", 0), 0u);

  const auto t1 = lines(dir.path() / "table1.csv");
  ASSERT_EQ(t1.size(), 4u);
  EXPECT_EQ(t1[0], "config,model,T_train,T,l2_norm,total_cost,terminal_norm,seconds,status");
  EXPECT_EQ(t1[1].rfind("a_unc,uncontrolled,,,", 0), 0u);
  EXPECT_EQ(t1[2].rfind("b_fom,FE,,0.5,", 0), 0u);
  const auto t2 = lines(dir.path() / "table2.csv");
  ASSERT_EQ(t2.size(), 3u);
  EXPECT_EQ(t2[0], "config,model,T_train,T,first_window_seconds,mean_window_seconds,status");
  EXPECT_TRUE(fs::exists(dir.path() / "b_fom" / "summary.csv"));
  EXPECT_FALSE(fs::exists(dir.path() / "c_bad"));
}

TEST(Report, SingleUncontrolledRow) {
  TempDir dir("srhc_bench_single");
  const BenchmarkReport report = run_benchmark({{"only", small_run(RhcMode::uncontrolled)}}, dir.path());
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_EQ(lines(dir.path() / "table1.csv").size(), 2u);
  EXPECT_EQ(lines(dir.path() / "table2.csv").size(), 1u);
  EXPECT_THROW(run_benchmark({}, dir.path()), ConfigError);
}

TEST(Report, ConfigDirectory) {
  TempDir dir("srhc_config_dir");
  fs::create_directories(dir.path());
  std::ofstream(dir.path() / "b.ini") << "[rhc]\nT = 1\n";
  std::ofstream(dir.path() / "a.ini") << "[rhc]\nT = 0.5\n";
  std::ofstream(dir.path() / "notes.txt") << "ignored\n";
  const auto configs = load_config_dir(dir.path());
  ASSERT_EQ(configs.size(), 2u);
  EXPECT_EQ(configs[0].name, "a");
  EXPECT_EQ(configs[1].config.rhc.T, 1.0);
  EXPECT_THROW(load_config_dir(dir.path() / "missing"), ConfigError);
}
