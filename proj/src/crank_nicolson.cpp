#include "sparse_rhc/crank_nicolson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

#include "sparse_rhc/errors.hpp"

namespace srhc {

namespace {

bool same_pattern(const SparseMatrix& a, const SparseMatrix& b) {
  if (!a.isCompressed() || !b.isCompressed() || a.outerSize() != b.outerSize() || a.nonZeros() != b.nonZeros()) {
    return false;
  }
  return std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1, b.outerIndexPtr()) &&
         std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr());
}

// m + c a, on the values array when the patterns coincide.
SparseMatrix shifted(const SparseMatrix& m, const SparseMatrix& a, double c) {
  if (!same_pattern(m, a)) {
    SparseMatrix out = m + c * a;
    out.makeCompressed();
    return out;
  }
  SparseMatrix out = m;
  Eigen::Map<Eigen::VectorXd> v(out.valuePtr(), out.nonZeros());
  v += c * Eigen::Map<const Eigen::VectorXd>(a.valuePtr(), a.nonZeros());
  return out;
}

}  // namespace

FullOrderStepper::FullOrderStepper(const FemModel& model, double dt) : model_(model), dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("FullOrderStepper: dt must be positive");
}

void FullOrderStepper::check_grid(const TimeGrid& grid) const {
  grid.validate();
  if (std::abs(grid.dt - dt_) > 1e-12 * dt_) {
    throw std::invalid_argument("grid step differs from the stepper step");
  }
  if (std::abs(grid.t0 - grid.first_node() * dt_) > 1e-9 * dt_) {
    throw std::invalid_argument("grid start is not on the dt lattice");
  }
}

std::shared_ptr<const StepOperators> FullOrderStepper::operators(long node) const {
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(node);
    if (it != cache_.end()) return it->second;
  }
  auto ops = std::make_shared<StepOperators>();
  const double t = node * dt_;
  ops->system = *system(node);
  ops->explicit_part = shifted(model_.mass(), ops->system, 0.5 * dt_);
  ops->implicit_lu.compute(shifted(model_.mass(), ops->system, -0.5 * dt_));
  if (ops->implicit_lu.info() != Eigen::Success) {
    throw NumericalError("singular Crank-Nicolson step matrix at t=" + std::to_string(t));
  }
  std::unique_lock lock(mutex_);
  auto [it, inserted] = cache_.emplace(node, std::move(ops));
  return it->second;
}

std::shared_ptr<const SparseMatrix> FullOrderStepper::system(long node) const {
  {
    std::shared_lock lock(mutex_);
    auto it = systems_.find(node);
    if (it != systems_.end()) return it->second;
  }
  auto a = std::make_shared<const SparseMatrix>(model_.system_matrix(node * dt_));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = systems_.emplace(node, std::move(a));
  return it->second;
}

std::shared_ptr<const Eigen::SparseLU<SparseMatrix>> FullOrderStepper::reference_lu(long node) const {
  const long block = node >= 0 ? node / kReferenceSpan : -((-node + kReferenceSpan - 1) / kReferenceSpan);
  {
    std::shared_lock lock(mutex_);
    auto it = references_.find(block);
    if (it != references_.end()) return it->second;
  }
  const SparseMatrix a = model_.system_matrix((block * kReferenceSpan + kReferenceSpan / 2) * dt_);
  auto lu = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
  lu->compute(shifted(model_.mass(), a, -0.5 * dt_));
  if (lu->info() != Eigen::Success) throw NumericalError("singular reference step matrix");
  std::unique_lock lock(mutex_);
  auto [it, inserted] = references_.emplace(block, std::move(lu));
  return it->second;
}

Eigen::VectorXd FullOrderStepper::propagate(long node, const Eigen::VectorXd& y, const Eigen::VectorXd& u_left,
                                            const Eigen::VectorXd& u_right) const {
  Eigen::VectorXd rhs = shifted(model_.mass(), *system(node), 0.5 * dt_) * y;
  rhs.noalias() += (0.5 * dt_) * (model_.control() * (u_left + u_right));
  const SparseMatrix implicit = shifted(model_.mass(), *system(node + 1), -0.5 * dt_);
  const auto ref_ptr = reference_lu(node + 1);
  const auto& ref = *ref_ptr;
  const double target = 1e-14 * rhs.norm();
  Eigen::VectorXd x = ref.solve(rhs);
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 40; ++it) {
    Eigen::VectorXd r = rhs;
    r.noalias() -= implicit * x;
    const double rn = r.norm();
    if (rn <= target) {
      if (!x.allFinite()) break;
      return x;
    }
    if (!(rn < last)) break;
    last = rn;
    x += ref.solve(r);
  }
  return step(node, y, u_left, u_right);
}

void FullOrderStepper::release_before(long node) const {
  std::unique_lock lock(mutex_);
  cache_.erase(cache_.begin(), cache_.lower_bound(node));
  systems_.erase(systems_.begin(), systems_.lower_bound(node));
  references_.erase(references_.begin(), references_.lower_bound(node / kReferenceSpan));
}

void FullOrderStepper::release_factorizations() const {
  std::unique_lock lock(mutex_);
  cache_.clear();
}

std::size_t FullOrderStepper::cached_nodes() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

Eigen::VectorXd FullOrderStepper::step(long node, const Eigen::VectorXd& y, const Eigen::VectorXd& u_left,
                                       const Eigen::VectorXd& u_right) const {
  const auto left = operators(node);
  const auto right = operators(node + 1);
  Eigen::VectorXd rhs = left->explicit_part * y;
  rhs.noalias() += (0.5 * dt_) * (model_.control() * (u_left + u_right));
  Eigen::VectorXd next = right->implicit_lu.solve(rhs);
  if (!next.allFinite()) throw NumericalError("non-finite state at node " + std::to_string(node + 1));
  return next;
}

Trajectory FullOrderStepper::integrate_state(const TimeGrid& grid, const Eigen::MatrixXd& u,
                                             const Eigen::VectorXd& y0) const {
  check_grid(grid);
  if (u.rows() != model_.num_controls() || u.cols() != grid.num_nodes()) {
    throw std::invalid_argument("integrate_state: control has wrong shape");
  }
  if (y0.size() != model_.num_states()) throw std::invalid_argument("integrate_state: y0 has wrong size");
  if (!y0.allFinite() || !u.allFinite()) throw NumericalError("integrate_state: non-finite input");
  Trajectory y = Trajectory::zeros(grid, model_.num_states());
  y.values.col(0) = y0;
  const long first = grid.first_node();
  for (int k = 0; k < grid.n_steps; ++k) {
    y.values.col(k + 1) = step(first + k, y.values.col(k), u.col(k), u.col(k + 1));
  }
  return y;
}

Trajectory FullOrderStepper::integrate_adjoint(const Trajectory& y) const {
  const TimeGrid& grid = y.grid;
  check_grid(grid);
  const Eigen::VectorXd w = grid.trapezoid_weights();
  Trajectory p = Trajectory::zeros(grid, model_.num_states());
  const long first = grid.first_node();
  const SparseMatrix& s = model_.stiffness();
  for (int k = grid.n_steps - 1; k >= 0; --k) {
    const auto ops = operators(first + k + 1);
    Eigen::VectorXd rhs = w[k + 1] * (s * y.values.col(k + 1));
    if (k + 1 < grid.n_steps) rhs.noalias() += ops->explicit_part.transpose() * p.values.col(k + 1);
    p.values.col(k) = ops->implicit_lu.transpose().solve(rhs);
  }
  if (!p.values.allFinite()) throw NumericalError("non-finite adjoint");
  return p;
}

Eigen::MatrixXd FullOrderStepper::control_gradient(const Trajectory& p) const {
  const TimeGrid& grid = p.grid;
  const Eigen::VectorXd w = grid.trapezoid_weights();
  const Eigen::MatrixXd bt_p = model_.control().transpose() * p.values;
  Eigen::MatrixXd g(bt_p.rows(), grid.num_nodes());
  for (int k = 0; k < grid.num_nodes(); ++k) {
    Eigen::VectorXd sum = bt_p.col(k);
    if (k > 0) sum += bt_p.col(k - 1);
    g.col(k) = (0.5 * grid.dt / w[k]) * sum;
  }
  return g;
}

double FullOrderStepper::smooth_cost(const Trajectory& y) const {
  const Eigen::VectorXd w = y.grid.trapezoid_weights();
  const SparseMatrix& s = model_.stiffness();
  double total = 0.0;
  for (int k = 0; k < y.grid.num_nodes(); ++k) {
    total += w[k] * y.values.col(k).dot(s * y.values.col(k));
  }
  return 0.5 * total;
}

double control_penalty(const Eigen::VectorXd& weights, const Eigen::MatrixXd& u, double beta) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    const double l1 = u.col(k).lpNorm<1>();
    total += weights[k] * l1 * l1;
  }
  return 0.5 * beta * total;
}

CostParts eval_cost(const FemModel& model, const Trajectory& y, const Trajectory& u, double beta) {
  if (!(y.grid == u.grid)) throw std::invalid_argument("eval_cost: state and control grids differ");
  const Eigen::VectorXd w = y.grid.trapezoid_weights();
  CostParts c;
  double smooth = 0.0;
  for (int k = 0; k < y.grid.num_nodes(); ++k) {
    smooth += w[k] * y.values.col(k).dot(model.stiffness() * y.values.col(k));
  }
  c.smooth = 0.5 * smooth;
  c.penalty = control_penalty(w, u.values, beta);
  c.total = c.smooth + c.penalty;
  return c;
}

double mass_norm(const FemModel& model, const Eigen::VectorXd& y) {
  return std::sqrt(std::max(0.0, y.dot(model.mass() * y)));
}

}  // namespace srhc
