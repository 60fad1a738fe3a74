#include "sparse_rhc/reduced_model.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "sparse_rhc/errors.hpp"

namespace srhc {

namespace {

// Below this reciprocal condition estimate a reduced step matrix is rejected.
constexpr double kMinRcond = 1e-13;

void check_conditioning(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, long node) {
  const double rc = lu.rcond();
  if (!(rc > kMinRcond)) {
    throw NumericalError("ill-conditioned reduced step matrix at node " + std::to_string(node) +
                         " (rcond " + std::to_string(rc) + ")");
  }
}

}  // namespace

const char* to_string(PodAdjoint adjoint) { return adjoint == PodAdjoint::projected ? "projected" : "consistent"; }

ReducedModel::ReducedModel(const FullOrderStepper& stepper, PodBasis basis_y, PodBasis basis_p, PodAdjoint adjoint)
    : stepper_(stepper), basis_y_(std::move(basis_y)), basis_p_(std::move(basis_p)), adjoint_(adjoint) {
  const FemModel& model = stepper_.model();
  const int m = model.num_states();
  if (basis_y_.psi.rows() != m || basis_y_.psi.cols() < 1) {
    throw std::invalid_argument("ReducedModel: state basis does not match the model");
  }
  if (adjoint_ == PodAdjoint::projected && (basis_p_.psi.rows() != m || basis_p_.psi.cols() < 1)) {
    throw std::invalid_argument("ReducedModel: adjoint basis does not match the model");
  }
  const Eigen::MatrixXd& py = basis_y_.psi;
  const Eigen::MatrixXd& pp = psi_p();
  const bool projected = adjoint_ == PodAdjoint::projected;
  psi_all_.resize(m, py.cols() + (projected ? pp.cols() : 0));
  psi_all_.leftCols(py.cols()) = py;
  if (projected) psi_all_.rightCols(pp.cols()) = pp;
  w_psi_y_ = pod_weight_matrix(model, basis_y_.weight_id) * py;
  mass_y_ = py.transpose() * (model.mass() * py);
  stiffness_y_ = py.transpose() * (model.stiffness() * py);
  mass_p_ = pp.transpose() * (model.mass() * pp);
  coupling_ = pp.transpose() * (model.stiffness() * py);
  control_y_ = py.transpose() * model.control();
  control_p_ = pp.transpose() * model.control();
}

Eigen::VectorXd ReducedModel::reduce_state(const Eigen::VectorXd& y) const {
  if (y.size() != w_psi_y_.rows()) throw std::invalid_argument("reduce_state: wrong state size");
  return w_psi_y_.transpose() * y;
}

Eigen::MatrixXd ReducedModel::reduced_system(long node) const {
  const Eigen::MatrixXd& py = basis_y_.psi;
  return py.transpose() * (*stepper_.system(node) * py);
}

std::shared_ptr<const ReducedStep> ReducedModel::operators(long node) const {
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(node);
    if (it != cache_.end()) return it->second;
  }
  const double h2 = 0.5 * dt();
  const auto a = stepper_.system(node);
  auto ops = std::make_shared<ReducedStep>();
  const Eigen::MatrixXd& py = basis_y_.psi;
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a_psi = *a * psi_all_;
  const Eigen::MatrixXd ay = py.transpose() * a_psi.leftCols(py.cols());
  ops->explicit_y = mass_y_ + h2 * ay;
  ops->implicit_y.compute(mass_y_ - h2 * ay);
  check_conditioning(ops->implicit_y, node);
  if (adjoint_ == PodAdjoint::projected) {
    const Eigen::MatrixXd& pp = basis_p_.psi;
    const Eigen::MatrixXd ap = pp.transpose() * a_psi.rightCols(pp.cols());
    ops->explicit_p = mass_p_ + h2 * ap;
    ops->implicit_p.compute(mass_p_ - h2 * ap);
    check_conditioning(ops->implicit_p, node);
  }
  std::unique_lock lock(mutex_);
  auto [it, inserted] = cache_.emplace(node, std::move(ops));
  return it->second;
}

void ReducedModel::release_before(long node) const {
  std::unique_lock lock(mutex_);
  cache_.erase(cache_.begin(), cache_.lower_bound(node));
}

std::size_t ReducedModel::cached_nodes() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

Eigen::MatrixXd ReducedModel::integrate_state(const TimeGrid& grid, const Eigen::MatrixXd& u,
                                              const Eigen::VectorXd& yh0) const {
  grid.validate();
  if (u.rows() != num_controls() || u.cols() != grid.num_nodes()) {
    throw std::invalid_argument("reduced integrate_state: control has wrong shape");
  }
  if (yh0.size() != ell_y()) throw std::invalid_argument("reduced integrate_state: wrong initial size");
  const long first = grid.first_node();
  const double h2 = 0.5 * grid.dt;
  Eigen::MatrixXd yh(ell_y(), grid.num_nodes());
  yh.col(0) = yh0;
  auto left = operators(first);
  for (int k = 0; k < grid.n_steps; ++k) {
    auto right = operators(first + k + 1);
    Eigen::VectorXd rhs = left->explicit_y * yh.col(k);
    rhs.noalias() += h2 * (control_y_ * (u.col(k) + u.col(k + 1)));
    yh.col(k + 1) = right->implicit_y.solve(rhs);
    left = std::move(right);
  }
  if (!yh.allFinite()) throw NumericalError("non-finite reduced state");
  return yh;
}

Eigen::MatrixXd ReducedModel::integrate_adjoint(const TimeGrid& grid, const Eigen::MatrixXd& yh) const {
  grid.validate();
  if (yh.rows() != ell_y() || yh.cols() != grid.num_nodes()) {
    throw std::invalid_argument("reduced integrate_adjoint: state has wrong shape");
  }
  const Eigen::VectorXd w = grid.trapezoid_weights();
  const long first = grid.first_node();
  const bool projected = adjoint_ == PodAdjoint::projected;
  const Eigen::MatrixXd& source = projected ? coupling_ : stiffness_y_;
  Eigen::MatrixXd ph = Eigen::MatrixXd::Zero(ell_p(), grid.num_nodes());
  for (int k = grid.n_steps - 1; k >= 0; --k) {
    const auto ops = operators(first + k + 1);
    Eigen::VectorXd rhs = w[k + 1] * (source * yh.col(k + 1));
    const Eigen::MatrixXd& expl = projected ? ops->explicit_p : ops->explicit_y;
    const auto& impl = projected ? ops->implicit_p : ops->implicit_y;
    if (k + 1 < grid.n_steps) rhs.noalias() += expl.transpose() * ph.col(k + 1);
    ph.col(k) = impl.transpose().solve(rhs);
  }
  if (!ph.allFinite()) throw NumericalError("non-finite reduced adjoint");
  return ph;
}

Eigen::MatrixXd ReducedModel::control_gradient(const TimeGrid& grid, const Eigen::MatrixXd& ph) const {
  const Eigen::VectorXd w = grid.trapezoid_weights();
  const Eigen::MatrixXd bt_p = control_p_.transpose() * ph;
  Eigen::MatrixXd g(bt_p.rows(), grid.num_nodes());
  for (int k = 0; k < grid.num_nodes(); ++k) {
    Eigen::VectorXd sum = bt_p.col(k);
    if (k > 0) sum += bt_p.col(k - 1);
    g.col(k) = (0.5 * grid.dt / w[k]) * sum;
  }
  return g;
}

double ReducedModel::smooth_cost(const TimeGrid& grid, const Eigen::MatrixXd& yh) const {
  const Eigen::VectorXd w = grid.trapezoid_weights();
  double total = 0.0;
  for (int k = 0; k < grid.num_nodes(); ++k) total += w[k] * yh.col(k).dot(stiffness_y_ * yh.col(k));
  return 0.5 * total;
}

ReducedProblem::ReducedProblem(const ReducedModel& model, TimeGrid grid, Eigen::VectorXd yh0, double beta)
    : model_(model), grid_(grid), yh0_(std::move(yh0)), beta_(beta) {
  grid_.validate();
  if (!(beta_ > 0.0)) throw std::invalid_argument("ReducedProblem: beta must be positive");
  if (std::abs(grid_.dt - model_.dt()) > 1e-12 * model_.dt()) {
    throw std::invalid_argument("ReducedProblem: grid step differs from the model step");
  }
}

}  // namespace srhc
