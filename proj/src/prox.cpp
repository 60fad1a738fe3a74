#include "sparse_rhc/prox.hpp"

#include <cmath>
#include <stdexcept>

#include "sparse_rhc/errors.hpp"

namespace srhc {

void ProxParams::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(bisect_tol > 0.0) || max_bisect < 1) {
    throw std::invalid_argument("ProxParams: alpha, beta, bisect_tol must be positive");
  }
}

Eigen::VectorXd prox_weights(double mu, const Eigen::VectorXd& x, const ProxParams& params) {
  const double ab = params.alpha * params.beta;
  const double scale = std::sqrt(0.5 * ab) / std::sqrt(mu);
  return (scale * x.cwiseAbs().array() - ab).cwiseMax(0.0).matrix();
}

double psi(double mu, const Eigen::VectorXd& x, const ProxParams& params) {
  if (!(mu > 0.0)) throw std::invalid_argument("psi: mu must be positive");
  return prox_weights(mu, x, params).sum() - 1.0;
}

double find_mu_star(const Eigen::VectorXd& x, const ProxParams& params) {
  params.validate();
  const double xmax = x.cwiseAbs().maxCoeff();
  if (!(xmax > 0.0)) throw std::invalid_argument("find_mu_star: x must be nonzero");
  double lo = 0.0;
  double hi = xmax * xmax / (2.0 * params.alpha * params.beta);
  for (int it = 0; it < params.max_bisect; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psi(mid, x, params) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (lo > 0.0 && hi - lo <= params.bisect_tol * lo) break;
  }
  if (!(lo > 0.0)) {
    // Reached only for max_bisect too small to leave the left end.
    lo = 0.5 * hi;
  }
  return 0.5 * (lo + hi);
}

ProxEvaluation prox_g_detailed(const Eigen::VectorXd& x, const ProxParams& params) {
  if (!x.allFinite()) throw NumericalError("prox_g: non-finite input");
  ProxEvaluation out;
  out.value = Eigen::VectorXd::Zero(x.size());
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0) return out;
  const double ab = params.alpha * params.beta;
  out.mu_star = find_mu_star(x, params);
  out.lambda = prox_weights(out.mu_star, x, params);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double l = out.lambda[i];
    if (l > 0.0) {
      out.value[i] = l * x[i] / (l + ab);
      ++out.support;
    }
  }
  return out;
}

Eigen::VectorXd prox_g(const Eigen::VectorXd& x, const ProxParams& params) {
  return prox_g_detailed(x, params).value;
}

Eigen::MatrixXd prox_columns(const Eigen::MatrixXd& u, const ProxParams& params) {
  Eigen::MatrixXd out(u.rows(), u.cols());
  for (Eigen::Index k = 0; k < u.cols(); ++k) out.col(k) = prox_g(u.col(k), params);
  return out;
}

Trajectory prox_trajectory(const Trajectory& u, const ProxParams& params) {
  return Trajectory(u.grid, prox_columns(u.values, params));
}

}  // namespace srhc
