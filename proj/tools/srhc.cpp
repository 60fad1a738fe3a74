// Command line front end: single runs, the benchmark sweep, uncontrolled runs.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "sparse_rhc/config.hpp"
#include "sparse_rhc/errors.hpp"
#include "sparse_rhc/report.hpp"
#include "sparse_rhc/rhc_pod.hpp"

namespace fs = std::filesystem;
using namespace srhc;

namespace {

struct Overrides {
  std::string out;
  bool verbose = false;
  std::string norm;
};

void apply(RunConfig& config, const Overrides& o) {
  if (!o.out.empty()) config.out_dir = o.out;
  if (o.verbose) config.verbose = true;
  if (!o.norm.empty()) config.rhc.norm = o.norm == "mass" ? NormKind::mass : NormKind::euclidean;
}

void print_summary(const RunConfig& config, const RunOutcome& run) {
  const RhcResult& r = run.result;
  std::cout << "mode " << to_string(r.mode);
  if (r.mode != RhcMode::uncontrolled) std::cout << "  T " << config.rhc.T;
  if (r.mode == RhcMode::pod) std::cout << "  T_train " << config.rhc.pod.T_train;
  std::cout << "\n  terminal_norm " << r.metrics.terminal_norm << "\n  l2_norm " << r.metrics.l2_norm
            << "\n  total_cost " << r.metrics.total_cost << "\n  seconds " << run.seconds
            << "\n  reintegration_error " << run.reintegration << '\n';
  if (r.mode == RhcMode::pod) std::cout << "  ell_y " << r.basis_y.ell << "  ell_p " << r.basis_p.ell << '\n';
  if (r.mode != RhcMode::uncontrolled && !r.windows.empty()) {
    std::cout << "  first_window_s " << r.windows.front().seconds << "  mean_window_s " << r.mean_window_seconds(1)
              << '\n';
  }
  if (r.unconverged_windows() > 0) std::cout << "  unconverged windows " << r.unconverged_windows() << '\n';
  std::cout << "  output " << config.out_dir << '\n';
}

int run_one(RunConfig config, const Overrides& o, std::optional<RhcMode> force_mode, bool compare) {
  apply(config, o);
  if (force_mode) config.rhc.mode = *force_mode;
  config.rhc.validate();
  const FemModel model = make_benchmark_model(config.rhc);
  std::ostream* log = config.verbose ? &std::cerr : nullptr;
  const RunOutcome run = execute_run(config, model, log);
  write_run_outputs(config.out_dir, config, model, run.result, run.seconds, run.reintegration);
  print_summary(config, run);
  if (compare && config.rhc.mode == RhcMode::pod) {
    RunConfig fom = config;
    fom.rhc.mode = RhcMode::fom;
    fom.out_dir = (fs::path(config.out_dir) / "fom").string();
    const RunOutcome ref = execute_run(fom, model, log);
    write_run_outputs(fom.out_dir, fom, model, ref.result, ref.seconds, ref.reintegration);
    const ErrorSeries errors = rom_error_report(model, ref.result, run.result);
    write_error_csv(config.out_dir, errors);
    std::cout << "comparison with the full-order loop\n  terminal_norm " << ref.result.metrics.terminal_norm
              << "\n  integrated state error " << errors.integrated_state_error() << "\n  zero pattern agreement "
              << zero_pattern_agreement(ref.result.u_rh, run.result.u_rh) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse receding horizon control of an unstable parabolic equation, with POD reduction"};
  app.require_subcommand(1);
  app.footer(config_help());

  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output directory (overrides [output] dir)");
    sub->add_flag("--verbose", o.verbose, "per-window progress on stderr");
    sub->add_option("--norm", o.norm, "norm of state_norms.csv")->check(CLI::IsMember({"mass", "euclidean"}));
  };

  std::string config_path;
  bool compare = false;
  auto* run = app.add_subcommand("run", "run the configured closed loop");
  run->add_option("config", config_path, "INI config file")->required();
  run->add_flag("--compare", compare, "for pod mode, also run the full-order loop and write the differences");
  add_common(run);

  std::string bench_dir;
  auto* bench = app.add_subcommand("bench", "run every *.ini of a directory and write table1.csv, table2.csv");
  bench->add_option("config-dir", bench_dir, "directory of INI configs")->required();
  add_common(bench);

  auto* unc = app.add_subcommand("uncontrolled", "run the configured model with zero control");
  unc->add_option("config", config_path, "INI config file")->required();
  add_common(unc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return run_one(load_config(config_path), o, std::nullopt, compare);
    if (unc->parsed()) return run_one(load_config(config_path), o, RhcMode::uncontrolled, false);
    if (bench->parsed()) {
      auto configs = load_config_dir(bench_dir);
      const fs::path out = o.out.empty() ? fs::path("bench_out") : fs::path(o.out);
      for (auto& nc : configs) {
        Overrides per = o;
        per.out.clear();
        apply(nc.config, per);
      }
      const BenchmarkReport report = run_benchmark(configs, out, &std::cerr);
      int failed = 0;
      for (const auto& r : report.rows) failed += r.status.rfind("failed", 0) == 0;
      std::cout << report.rows.size() << " runs, " << failed << " failed; tables in " << out.string() << '\n';
      return failed ? 2 : 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
