#pragma once

#include <Eigen/Dense>

#include "sparse_rhc/trajectory.hpp"

namespace srhc {

/// Scaling of the penalty g(u) = beta/2 |u|_1^2 inside prox_{alpha g}.
struct ProxParams {
  double alpha = 1.0;
  double beta = 1.0;
  double bisect_tol = 1e-10;
  int max_bisect = 200;

  /// Throws std::invalid_argument unless alpha, beta, bisect_tol > 0 and max_bisect >= 1.
  void validate() const;
};

/// psi(mu) = sum_i [ sqrt(alpha beta/2) |x_i| / sqrt(mu) - alpha beta ]_+ - 1,
/// nonincreasing in mu. Throws std::invalid_argument for mu <= 0.
double psi(double mu, const Eigen::VectorXd& x, const ProxParams& params);

/// lambda_i(mu) = [ sqrt(alpha beta/2) |x_i| / sqrt(mu) - alpha beta ]_+.
Eigen::VectorXd prox_weights(double mu, const Eigen::VectorXd& x, const ProxParams& params);

/// Positive zero of psi by bisection. The bracket (0, |x|_inf^2 / (2 alpha beta)]
/// always contains the zero: psi is +inf at the left end and -1 at the right.
/// Bisection stops once the bracket is narrower than bisect_tol relative to
/// its lower end. Throws std::invalid_argument for x = 0.
double find_mu_star(const Eigen::VectorXd& x, const ProxParams& params);

struct ProxEvaluation {
  Eigen::VectorXd value;
  Eigen::VectorXd lambda;  // empty for x = 0
  double mu_star = 0.0;    // 0 for x = 0
  int support = 0;         // number of nonzero components of value
};

/// argmin_u 1/2 |u - x|^2 + (alpha beta / 2) |u|_1^2.
/// Throws NumericalError for non-finite x.
ProxEvaluation prox_g_detailed(const Eigen::VectorXd& x, const ProxParams& params);
Eigen::VectorXd prox_g(const Eigen::VectorXd& x, const ProxParams& params);

/// Column-wise prox_g (one column per time node).
Eigen::MatrixXd prox_columns(const Eigen::MatrixXd& u, const ProxParams& params);
Trajectory prox_trajectory(const Trajectory& u, const ProxParams& params);

}  // namespace srhc
