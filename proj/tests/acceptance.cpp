// Full-scale checks on the default 32x32 benchmark. Prints one PASS/FAIL line
// per check followed by the measured values; exit status 1 if any check fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "sparse_rhc/report.hpp"
#include "sparse_rhc/rhc_pod.hpp"
#include "support.hpp"

using namespace srhc;
using srhc::testing::random_matrix;

namespace {

struct Timed {
  RhcResult result;
  double seconds = 0.0;
  double reintegration = 0.0;
};

class Runner {
 public:
  Timed run(const RhcConfig& config) {
    const FemModel model = make_benchmark_model(config);
    RunConfig rc;
    rc.rhc = config;
    const RunOutcome out = execute_run(rc, model);
    worst_reintegration_ = std::max(worst_reintegration_, out.reintegration);
    ++runs_;
    std::fprintf(stderr, "  run %-12s T=%-5g T_train=%-4g %6.2fs terminal=%.6g\n", to_string(config.mode), config.T,
                 config.mode == RhcMode::pod ? config.pod.T_train : 0.0, out.seconds,
                 out.result.metrics.terminal_norm);
    return {out.result, out.seconds, out.reintegration};
  }
  double worst_reintegration() const { return worst_reintegration_; }
  int runs() const { return runs_; }

 private:
  double worst_reintegration_ = 0.0;
  int runs_ = 0;
};

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& measured) {
  failures += !pass;
  std::printf("[%2d] %s  %s\n     %s\n", id, pass ? "PASS" : "FAIL", what.c_str(), measured.c_str());
  std::fflush(stdout);
}

std::string format(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double mean_reduced_seconds(const RhcResult& r, int first) { return r.mean_window_seconds(first); }

RhcConfig fom(double T) {
  RhcConfig c;
  c.T = T;
  return c;
}

RhcConfig pod(double T, double T_train) {
  RhcConfig c;
  c.mode = RhcMode::pod;
  c.T = T;
  c.pod.T_train = T_train;
  return c;
}

void prox_check() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> expo(-2.0, 1.5), unit(-1.0, 1.0);
  const std::array<int, 5> sizes{1, 2, 3, 5, 13};
  double worst = 0.0, worst_sum = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = sizes[trial % sizes.size()];
    Eigen::VectorXd x(n);
    const double scale = std::pow(10.0, expo(rng));
    for (int i = 0; i < n; ++i) x[i] = scale * unit(rng);
    const ProxParams p{std::pow(10.0, expo(rng)), std::pow(10.0, expo(rng))};
    const ProxEvaluation e = prox_g_detailed(x, p);
    const Eigen::VectorXd ref = srhc::testing::brute_force_prox(x, p.alpha * p.beta);
    worst = std::max(worst, (e.value - ref).cwiseAbs().maxCoeff());
    worst_sum = std::max(worst_sum, std::abs(e.lambda.sum() - 1.0));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(6, worst <= 1e-6 && worst_sum <= 1e-6 && seconds < 60.0,
         "prox matches a brute-force minimizer on 1000 random cases",
         format("max |prox - brute force| = %.3g, max |sum lambda - 1| = %.3g, %.2f s", worst, worst_sum, seconds));
}

void gradient_check() {
  const FemModel model(build_mesh(8), Coefficients::benchmark(), ActuatorLayout::default_layout());
  const double dt = 1.0 / 80.0;
  const FullOrderStepper stepper(model, dt);
  const TimeGrid g{0.0, 16, dt};
  const Eigen::VectorXd w = g.trapezoid_weights();
  const Eigen::VectorXd y0 = model.interpolate(benchmark_initial_state);
  std::mt19937 rng(11);
  auto cost = [&](const Eigen::MatrixXd& u) { return stepper.smooth_cost(stepper.integrate_state(g, u, y0)); };
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd u = random_matrix(rng, 13, 17, 10.0), d = random_matrix(rng, 13, 17);
    const Eigen::MatrixXd grad = stepper.control_gradient(stepper.integrate_adjoint(stepper.integrate_state(g, u, y0)));
    const double fd = (cost(u + 1e-3 * d) - cost(u - 1e-3 * d)) / 2e-3;
    worst = std::max(worst, rel(weighted_inner(w, grad, d), fd));
  }
  report(7, worst <= 1e-5, "adjoint gradient vs central differences, 20 trials (n_side 8, 16 steps)",
         format("max relative error = %.3g", worst));
}

void pod_identity_check() {
  const FemModel model(build_mesh(6), Coefficients::benchmark(), ActuatorLayout::default_layout());
  std::mt19937 rng(100);
  double worst = 0.0, worst_gram = 0.0;
  int checked = 0;
  for (int rank : {4, 12, 20}) {
    SnapshotSet s(model.num_states());
    std::uniform_real_distribution<double> wd(0.05, 2.0);
    Eigen::VectorXd alpha(20);
    for (int j = 0; j < 20; ++j) alpha[j] = wd(rng);
    s.append(random_matrix(rng, model.num_states(), rank) * random_matrix(rng, rank, 20), alpha);
    const PodBasis b = compute_pod_basis(s, model.mass(), 0.0);
    const double s1 = b.sigma[0] * b.sigma[0];
    const Eigen::MatrixXd dz = s.columns * s.weights.cwiseSqrt().asDiagonal();
    const Eigen::VectorXd lambda =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dz.transpose() * (model.mass() * dz)).eigenvalues().reverse();
    for (int ell = 1; ell <= b.ell; ++ell) {
      double tail = 0.0, gram_tail = 0.0;
      for (int i = ell; i < b.sigma.size(); ++i) tail += b.sigma[i] * b.sigma[i];
      for (int i = ell; i < 20; ++i) gram_tail += std::max(lambda[i], 0.0);
      const double err = reconstruction_error(s, b, model.mass(), ell);
      // relative to the tail, with an absolute floor of 1e-12 sigma_1^2 once the tail vanishes
      const double scale = std::max(tail, 1e-4 * s1);
      worst = std::max(worst, std::abs(err - tail) / scale);
      worst_gram = std::max(worst_gram, std::abs(err - gram_tail) / std::max(gram_tail, 1e-4 * s1));
      ++checked;
    }
  }
  report(8, worst <= 1e-8 && worst_gram <= 1e-8,
         "POD reconstruction error equals the singular value tail (20 snapshots, ranks 4/12/20)",
         format("%d truncations, max relative deviation %.3g (SVD), %.3g (Gram eigensolve)", checked, worst,
                worst_gram));
}

int identically_zero_in_both(const Trajectory& a, const Trajectory& b) {
  int n = 0;
  for (Eigen::Index i = 0; i < a.values.rows(); ++i) {
    n += a.values.row(i).cwiseAbs().maxCoeff() == 0.0 && b.values.row(i).cwiseAbs().maxCoeff() == 0.0;
  }
  return n;
}

}  // namespace

int main() {
  Runner runner;
  std::fprintf(stderr, "running the closed loops (n_side 32, dt 1/80, T_inf 10)\n");

  {
    RhcConfig c;
    c.mode = RhcMode::uncontrolled;
    const Timed u = runner.run(c);
    const double term = u.result.metrics.terminal_norm, l2 = u.result.metrics.l2_norm;
    report(1, term >= 340 && term <= 460 && l2 >= 340 && l2 <= 460 && u.seconds < 30.0,
           "uncontrolled run: |y(T_inf)|_M and |y|_L2 in [340, 460], under 30 s",
           format("terminal %.4g, l2 %.4g, %.2f s", term, l2, u.seconds));
  }

  const std::array<double, 5> horizons{0.25, 0.5, 1.0, 1.5, 2.0};
  std::vector<Timed> fom_runs;
  for (double T : horizons) fom_runs.push_back(runner.run(fom(T)));
  {
    bool decreasing = true;
    std::string values;
    for (std::size_t i = 0; i < horizons.size(); ++i) {
      const double t = fom_runs[i].result.metrics.terminal_norm;
      if (i > 0 && !(t < fom_runs[i - 1].result.metrics.terminal_norm)) decreasing = false;
      values += format("%sT=%g: %.4g", i ? ", " : "", horizons[i], t);
    }
    const double t025 = fom_runs[0].result.metrics.terminal_norm;
    const double t15 = fom_runs[3].result.metrics.terminal_norm, t2 = fom_runs[4].result.metrics.terminal_norm;
    const bool pass = decreasing && t025 > 10.0 && t15 < 0.1 && t2 < 0.1 && t2 >= 1e-3 / 3.0 && t2 <= 3e-2;
    report(2, pass,
           "full-order terminal norms decrease with T, T=0.25 > 10, T>=1.5 < 0.1, T=2 in [3.3e-4, 3e-2]",
           values + (decreasing ? " (decreasing)" : " (not decreasing)"));
  }

  std::vector<Timed> pod_runs;
  const std::array<double, 3> pod_horizons{0.5, 1.0, 2.0};
  const std::array<int, 3> fom_index{1, 2, 4};
  for (double T : pod_horizons) pod_runs.push_back(runner.run(pod(T, T)));
  {
    double worst = 0.0;
    std::string values;
    for (std::size_t i = 0; i < pod_horizons.size(); ++i) {
      const RhcMetrics& r = pod_runs[i].result.metrics;
      const RhcMetrics& f = fom_runs[fom_index[i]].result.metrics;
      const double d = std::max({rel(r.l2_norm, f.l2_norm), rel(r.total_cost, f.total_cost),
                                 rel(r.terminal_norm, f.terminal_norm)});
      worst = std::max(worst, d);
      values += format("%sT=%g: %.2e (ell %d/%d)", i ? ", " : "", pod_horizons[i], d, pod_runs[i].result.basis_y.ell,
                       pod_runs[i].result.basis_p.ell);
    }
    report(3, worst <= 0.05, "POD runs (T_train = T = 0.5, 1, 2) within 5% of the full-order l2, cost, terminal",
           "max relative deviation " + values);
  }

  const RhcResult& fom2 = fom_runs[4].result;
  const RhcResult& pod2 = pod_runs[2].result;
  {
    const double fom_mean = fom2.mean_window_seconds(0);
    const double rom_mean = mean_reduced_seconds(pod2, 1);
    const double rom_steady = mean_reduced_seconds(pod2, 2);
    report(4, rom_mean <= fom_mean / 20.0, "mean reduced window time <= 1/20 of the full-order window time at T=2",
           format("full-order %.4f s, reduced %.4f s (windows 1..39; %.4f s over 2..39), ratio %.1f", fom_mean,
                  rom_mean, rom_steady, fom_mean / rom_mean));
  }

  {
    const Timed pod4 = runner.run(pod(4.0, 2.0));
    const double t4 = pod4.result.metrics.terminal_norm, t2 = pod2.metrics.terminal_norm;
    const double s4 = mean_reduced_seconds(pod4.result, 1), s2 = mean_reduced_seconds(pod2, 1);
    report(5, t4 < t2 && s4 <= 2.0 * s2, "POD T_train=2, T=4 ends below POD T=2 at under twice its window time",
           format("terminal %.4g vs %.4g, window %.4f s vs %.4f s (%.2fx)", t4, t2, s4, s2, s4 / s2));
  }

  prox_check();
  gradient_check();
  pod_identity_check();

  {
    const double agreement = zero_pattern_agreement(fom2.u_rh, pod2.u_rh);
    const int zero = identically_zero_in_both(fom2.u_rh, pod2.u_rh);
    report(9, agreement >= 0.99 && zero >= 1,
           "T=2 zero pattern of the POD control matches the full-order one, some actuator off in both",
           format("agreement %.4f, actuators identically zero in both: %d", agreement, zero));
  }

  report(10, runner.worst_reintegration() <= 1e-10, "re-integrating every closed loop reproduces y_rh",
         format("%d runs, max relative L2 error %.3g", runner.runs(), runner.worst_reintegration()));

  std::printf("%d of 10 checks failed\n", failures);
  return failures ? 1 : 0;
}
