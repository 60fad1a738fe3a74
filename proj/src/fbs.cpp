#include "sparse_rhc/fbs.hpp"

#include <stdexcept>

namespace srhc {

void FbsSettings::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("fbs: rel_tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("fbs: max_iter must be >= 1");
  if (ls_window < 1) throw std::invalid_argument("fbs: ls_window must be >= 1");
  if (!(ls_shrink > 0.0 && ls_shrink < 1.0)) throw std::invalid_argument("fbs: ls_shrink must lie in (0,1)");
  if (!(ls_c > 0.0 && ls_c < 1.0)) throw std::invalid_argument("fbs: ls_c must lie in (0,1)");
  if (!(step_min > 0.0 && step_min < step_max)) throw std::invalid_argument("fbs: need 0 < step_min < step_max");
  if (!(step_init > 0.0)) throw std::invalid_argument("fbs: step_init must be positive");
  if (!(bisect_tol > 0.0) || max_bisect < 1) throw std::invalid_argument("fbs: invalid bisection settings");
}

const char* to_string(FbsStatus status) {
  switch (status) {
    case FbsStatus::converged:
      return "converged";
    case FbsStatus::max_iter:
      return "max_iter";
    case FbsStatus::stalled:
      return "stalled";
  }
  return "unknown";
}

double fixed_point_residual(const Eigen::MatrixXd& u, const Eigen::MatrixXd& grad, const Eigen::VectorXd& weights,
                            double beta, double alpha_bar, const FbsSettings& settings) {
  const ProxParams prox{alpha_bar, beta, settings.bisect_tol, settings.max_bisect};
  const Eigen::MatrixXd diff = u - prox_columns(u - alpha_bar * grad, prox);
  const double nu = std::sqrt(weighted_inner(weights, u, u));
  return std::sqrt(weighted_inner(weights, diff, diff)) / std::max(1.0, nu);
}

}  // namespace srhc
