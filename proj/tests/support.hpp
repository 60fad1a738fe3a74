#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "sparse_rhc/rhc.hpp"

namespace srhc::testing {

/// Euclidean projection of a >= 0 onto {v >= 0, sum v = s} (sort based).
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& a, double s) {
  const int n = static_cast<int>(a.size());
  if (s <= 0.0) return Eigen::VectorXd::Zero(n);
  std::vector<double> sorted(a.data(), a.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (int k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double t = (cumulative - s) / (k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  return (a.array() - theta).max(0.0).matrix();
}

/// argmin_u 1/2|u - x|^2 + (c/2)|u|_1^2 by a grid over s = |u|_1 followed by
/// golden-section refinement; for fixed s the minimizer is the sign-restored
/// simplex projection of |x|.
inline Eigen::VectorXd brute_force_prox(const Eigen::VectorXd& x, double c) {
  const Eigen::VectorXd a = x.cwiseAbs();
  const double s_max = a.sum();
  if (s_max == 0.0) return Eigen::VectorXd::Zero(x.size());
  auto phi = [&](double s) {
    const Eigen::VectorXd v = project_simplex(a, s);
    return 0.5 * (v - a).squaredNorm() + 0.5 * c * s * s;
  };
  const int n_grid = 2000;
  int best = 0;
  double best_val = phi(0.0);
  for (int i = 1; i <= n_grid; ++i) {
    const double v = phi(s_max * i / n_grid);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = s_max * std::max(0, best - 1) / n_grid;
  double hi = s_max * std::min(n_grid, best + 1) / n_grid;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
  double f1 = phi(m1), f2 = phi(m2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, s_max); ++it) {
    if (f1 <= f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - g * (hi - lo);
      f1 = phi(m1);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + g * (hi - lo);
      f2 = phi(m2);
    }
  }
  double s = 0.5 * (lo + hi);
  if (phi(0.0) <= phi(s)) s = 0.0;
  Eigen::VectorXd u = project_simplex(a, s);
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = x[i] < 0.0 ? -u[i] : u[i];
  return u;
}

/// Same minimizer by exact cyclic coordinate descent on |u| (a second,
/// unrelated oracle for the prox tests).
inline Eigen::VectorXd coordinate_descent_prox(const Eigen::VectorXd& x, double c, int sweeps = 20000) {
  const Eigen::VectorXd a = x.cwiseAbs();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(a.size());
  double total = 0.0;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double change = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double rest = total - v[i];
      const double vi = std::max(0.0, (a[i] - c * rest) / (1.0 + c));
      change = std::max(change, std::abs(vi - v[i]));
      total = rest + vi;
      v[i] = vi;
    }
    if (change < 1e-15 * std::max(1.0, a.maxCoeff())) break;
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = x[i] < 0.0 ? -v[i] : v[i];
  return v;
}

/// Short closed loop on a coarse mesh for the driver tests.
inline RhcConfig small_config(RhcMode mode, int n_side = 8, double T = 0.5, double T_inf = 1.0) {
  RhcConfig c;
  c.mode = mode;
  c.n_side = n_side;
  c.T = T;
  c.T_inf = T_inf;
  c.pod.T_train = T;
  return c;
}

inline Eigen::MatrixXd random_matrix(std::mt19937& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = n(rng);
  }
  return m;
}

}  // namespace srhc::testing
