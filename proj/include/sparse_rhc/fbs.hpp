#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <concepts>
#include <deque>
#include <functional>
#include <iomanip>
#include <ostream>
#include <vector>

#include "sparse_rhc/prox.hpp"
#include "sparse_rhc/trajectory.hpp"

namespace srhc {

struct FbsSettings {
  double rel_tol = 1e-4;
  int max_iter = 500;
  int ls_window = 5;
  double ls_shrink = 0.5;
  double ls_c = 1e-4;
  double step_init = 1.0;
  double step_min = 1e-8;
  double step_max = 1e8;
  double bisect_tol = 1e-10;
  int max_bisect = 200;

  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
  bool operator==(const FbsSettings&) const = default;
};

enum class FbsStatus { converged, max_iter, stalled };

const char* to_string(FbsStatus status);

/// A finite-horizon problem  min F(u) + beta/2 trapz(|u|_1^2)  on a time
/// grid, where F is smooth and its gradient comes from an adjoint solve.
template <class P>
concept HorizonProblem = requires(const P& p, const Eigen::MatrixXd& u, const typename P::State& y,
                                  const typename P::Adjoint& adj) {
  { p.grid() } -> std::convertible_to<TimeGrid>;
  { p.num_controls() } -> std::convertible_to<int>;
  { p.beta() } -> std::convertible_to<double>;
  { p.simulate(u) } -> std::same_as<typename P::State>;
  { p.smooth_cost(y) } -> std::convertible_to<double>;
  { p.adjoint(y) } -> std::same_as<typename P::Adjoint>;
  { p.gradient(adj) } -> std::same_as<Eigen::MatrixXd>;
};

template <class P>
struct FbsResult {
  Eigen::MatrixXd u;
  typename P::State state;
  typename P::Adjoint adjoint;
  Eigen::MatrixXd gradient;
  double objective = 0.0;
  int iterations = 0;
  double fixed_point_residual = 0.0;
  double wall_time = 0.0;
  FbsStatus status = FbsStatus::max_iter;
  std::vector<double> objective_history;  // accepted iterates, initial guess first
  std::vector<double> envelope_history;   // max over the nonmonotone window before each step
};

/// |u - prox_{a G}(u - a grad)|_w / max(1, |u|_w).
double fixed_point_residual(const Eigen::MatrixXd& u, const Eigen::MatrixXd& grad, const Eigen::VectorXd& weights,
                            double beta, double alpha_bar, const FbsSettings& settings);

/// Forward-backward splitting  u+ = prox_{a G}(u - a grad F(u))  with
/// Barzilai-Borwein (BB1) trial steps and a nonmonotone max-type line search.
/// All inner products and norms are trapezoid-weighted in time, in which the
/// prox of G is exactly the node-wise prox of g.
///
/// `observer` sees the (state, adjoint) pair behind every gradient
/// evaluation, i.e. the initial guess and every accepted iterate.
template <HorizonProblem P>
FbsResult<P> solve_fbs(const P& problem, const Eigen::MatrixXd& u_init, const FbsSettings& settings,
                       const std::function<void(const typename P::State&, const typename P::Adjoint&)>& observer = {},
                       std::ostream* log = nullptr) {
  settings.validate();
  const auto start = std::chrono::steady_clock::now();
  const Eigen::VectorXd w = problem.grid().trapezoid_weights();
  const double beta = problem.beta();
  auto norm_sq = [&](const Eigen::MatrixXd& v) { return weighted_inner(w, v, v); };
  auto penalty = [&](const Eigen::MatrixXd& v) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
      const double l1 = v.col(k).lpNorm<1>();
      s += w[k] * l1 * l1;
    }
    return 0.5 * beta * s;
  };

  FbsResult<P> r;
  r.u = u_init;
  r.state = problem.simulate(r.u);
  r.objective = problem.smooth_cost(r.state) + penalty(r.u);
  r.adjoint = problem.adjoint(r.state);
  r.gradient = problem.gradient(r.adjoint);
  if (observer) observer(r.state, r.adjoint);
  r.objective_history.push_back(r.objective);

  std::deque<double> window{r.objective};
  ProxParams prox{settings.step_init, beta, settings.bisect_tol, settings.max_bisect};
  double step = settings.step_init;

  for (int iter = 1; iter <= settings.max_iter; ++iter) {
    const double envelope = *std::max_element(window.begin(), window.end());
    r.envelope_history.push_back(envelope);
    bool accepted = false;
    Eigen::MatrixXd u_new;
    typename P::State state_new;
    double obj_new = 0.0, change_sq = 0.0;
    while (step >= settings.step_min) {
      prox.alpha = step;
      u_new = prox_columns(r.u - step * r.gradient, prox);
      state_new = problem.simulate(u_new);
      obj_new = problem.smooth_cost(state_new) + penalty(u_new);
      change_sq = norm_sq(u_new - r.u);
      if (obj_new <= envelope - settings.ls_c / step * change_sq) {
        accepted = true;
        break;
      }
      step *= settings.ls_shrink;
    }
    if (!accepted) {
      r.status = FbsStatus::stalled;
      r.iterations = iter - 1;
      break;
    }

    auto adjoint_new = problem.adjoint(state_new);
    Eigen::MatrixXd grad_new = problem.gradient(adjoint_new);
    if (observer) observer(state_new, adjoint_new);

    const double u_norm_sq = norm_sq(u_new);
    const Eigen::MatrixXd s = u_new - r.u;
    const double sy = weighted_inner(w, s, grad_new - r.gradient);
    const double used_step = step;
    step = sy > 0.0 ? std::clamp(change_sq / sy, settings.step_min, settings.step_max) : settings.step_init;

    r.u = std::move(u_new);
    r.state = std::move(state_new);
    r.adjoint = std::move(adjoint_new);
    r.gradient = std::move(grad_new);
    r.objective = obj_new;
    r.iterations = iter;
    r.objective_history.push_back(obj_new);
    window.push_back(obj_new);
    while (static_cast<int>(window.size()) > settings.ls_window) window.pop_front();

    const double rel = u_norm_sq > 0.0 ? std::sqrt(change_sq / u_norm_sq) : (change_sq > 0.0 ? 1.0 : 0.0);
    if (log) {
      *log << "fbs " << iter << ' ' << std::scientific << std::setprecision(6) << obj_new << ' ' << used_step
           << ' ' << rel << std::defaultfloat << '\n';
    }
    if (rel <= settings.rel_tol) {
      r.status = FbsStatus::converged;
      break;
    }
  }
  r.fixed_point_residual = fixed_point_residual(r.u, r.gradient, w, beta, 1.0, settings);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace srhc
