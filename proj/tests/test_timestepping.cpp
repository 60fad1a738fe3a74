#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sparse_rhc/crank_nicolson.hpp"
#include "sparse_rhc/errors.hpp"
#include "support.hpp"

using namespace srhc;
using srhc::testing::random_matrix;

namespace {

FemModel benchmark_model(int n_side) {
  return FemModel(build_mesh(n_side), Coefficients::benchmark(), ActuatorLayout::default_layout());
}

Eigen::MatrixXd smooth_control(const TimeGrid& g, int controls) {
  Eigen::MatrixXd u(controls, g.num_nodes());
  for (int k = 0; k < g.num_nodes(); ++k) {
    for (int i = 0; i < controls; ++i) u(i, k) = std::sin(2.0 * g.time(k) + i);
  }
  return u;
}

}  // namespace

TEST(TimeGrid, TrapezoidWeights) {
  const TimeGrid g{0.5, 8, 0.125};
  const Eigen::VectorXd w = g.trapezoid_weights();
  ASSERT_EQ(w.size(), 9);
  EXPECT_DOUBLE_EQ(w[0], 0.0625);
  EXPECT_DOUBLE_EQ(w[8], 0.0625);
  EXPECT_DOUBLE_EQ(w[3], 0.125);
  EXPECT_NEAR(w.sum(), g.horizon(), 1e-15);
  EXPECT_EQ(g.first_node(), 4);
  EXPECT_DOUBLE_EQ(g.end(), 1.5);
  EXPECT_THROW((TimeGrid{0.0, 0, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((TimeGrid{0.0, 3, 0.0}.validate()), std::invalid_argument);
}

TEST(CrankNicolson, DiffusionDecayOfFirstMode) {
  const double nu = 0.1;
  const FemModel model(build_mesh(24), Coefficients::diffusion_only(nu), ActuatorLayout::default_layout());
  const FullOrderStepper stepper(model, 1.0 / 80.0);
  const TimeGrid g{0.0, 80, 1.0 / 80.0};
  const Eigen::VectorXd y0 = model.interpolate(benchmark_initial_state);
  const Trajectory y = stepper.integrate_state(g, Eigen::MatrixXd::Zero(13, 81), y0);
  const double ratio = mass_norm(model, y.values.col(80)) / mass_norm(model, y0);
  const double exact = std::exp(-2.0 * std::numbers::pi * std::numbers::pi * nu);
  EXPECT_NEAR(ratio / exact, 1.0, 0.03);
}

TEST(CrankNicolson, SecondOrderInTime) {
  const FemModel model = benchmark_model(8);
  const Eigen::VectorXd y0 = model.interpolate(benchmark_initial_state);
  auto terminal = [&](int n) {
    const double dt = 0.5 / n;
    const FullOrderStepper stepper(model, dt);
    const TimeGrid g{0.0, n, dt};
    return Eigen::VectorXd(stepper.integrate_state(g, smooth_control(g, 13), y0).values.col(n));
  };
  const Eigen::VectorXd ref = terminal(1280);
  const double e1 = mass_norm(model, terminal(10) - ref);
  const double e2 = mass_norm(model, terminal(20) - ref);
  const double e3 = mass_norm(model, terminal(40) - ref);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_GT(e2 / e3, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
  EXPECT_LT(e2 / e3, 4.5);
}

TEST(CrankNicolson, StateIsAffineInControlAndData) {
  const FemModel model = benchmark_model(6);
  const FullOrderStepper stepper(model, 0.05);
  const TimeGrid g{0.1, 10, 0.05};
  std::mt19937 rng(3);
  const Eigen::MatrixXd u1 = random_matrix(rng, 13, 11), u2 = random_matrix(rng, 13, 11);
  const Eigen::VectorXd y0 = random_matrix(rng, model.num_states(), 1);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.num_states());
  const Eigen::MatrixXd lhs = stepper.integrate_state(g, u1 + u2, y0).values;
  const Eigen::MatrixXd rhs = stepper.integrate_state(g, u1, y0).values + stepper.integrate_state(g, u2, zero).values;
  EXPECT_LT((lhs - rhs).norm(), 1e-12 * lhs.norm());
}

TEST(CrankNicolson, AdjointGradientMatchesCentralDifferences) {
  const FemModel model = benchmark_model(8);
  const double dt = 1.0 / 80.0;
  const FullOrderStepper stepper(model, dt);
  const TimeGrid g{0.0, 16, dt};
  const Eigen::VectorXd w = g.trapezoid_weights();
  const Eigen::VectorXd y0 = model.interpolate(benchmark_initial_state);
  std::mt19937 rng(11);
  auto cost = [&](const Eigen::MatrixXd& u) { return stepper.smooth_cost(stepper.integrate_state(g, u, y0)); };
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd u = random_matrix(rng, 13, 17, 10.0);
    const Eigen::MatrixXd d = random_matrix(rng, 13, 17);
    const Eigen::MatrixXd grad = stepper.control_gradient(stepper.integrate_adjoint(stepper.integrate_state(g, u, y0)));
    const double analytic = weighted_inner(w, grad, d);
    const double eps = 1e-3;
    const double fd = (cost(u + eps * d) - cost(u - eps * d)) / (2.0 * eps);
    EXPECT_LE(std::abs(analytic - fd), 1e-5 * std::abs(fd)) << "trial " << trial;
  }
}

TEST(CrankNicolson, GradientOnShiftedGrid) {
  const FemModel model = benchmark_model(6);
  const double dt = 0.05;
  const FullOrderStepper stepper(model, dt);
  const TimeGrid g{0.75, 12, dt};
  const Eigen::VectorXd w = g.trapezoid_weights();
  std::mt19937 rng(5);
  const Eigen::VectorXd y0 = random_matrix(rng, model.num_states(), 1);
  const Eigen::MatrixXd u = random_matrix(rng, 13, 13), d = random_matrix(rng, 13, 13);
  auto cost = [&](const Eigen::MatrixXd& v) { return stepper.smooth_cost(stepper.integrate_state(g, v, y0)); };
  const Eigen::MatrixXd grad = stepper.control_gradient(stepper.integrate_adjoint(stepper.integrate_state(g, u, y0)));
  const double fd = (cost(u + 1e-3 * d) - cost(u - 1e-3 * d)) / 2e-3;
  EXPECT_NEAR(weighted_inner(w, grad, d), fd, 1e-7 * std::abs(fd));
}

TEST(CrankNicolson, PropagateMatchesStep) {
  const FemModel model = benchmark_model(16);
  const double dt = 1.0 / 80.0;
  const FullOrderStepper stepper(model, dt);
  std::mt19937 rng(2);
  Eigen::VectorXd y = model.interpolate(benchmark_initial_state);
  for (long node = 30; node < 130; ++node) {
    const Eigen::VectorXd ul = random_matrix(rng, 13, 1), ur = random_matrix(rng, 13, 1);
    const Eigen::VectorXd a = stepper.step(node, y, ul, ur);
    const Eigen::VectorXd b = stepper.propagate(node, y, ul, ur);
    ASSERT_LT((a - b).norm(), 1e-12 * a.norm()) << "node " << node;
    y = a;
  }
}

TEST(CrankNicolson, CacheRelease) {
  const FemModel model = benchmark_model(6);
  const FullOrderStepper stepper(model, 0.1);
  const TimeGrid g{0.0, 10, 0.1};
  stepper.integrate_state(g, Eigen::MatrixXd::Zero(13, 11), model.interpolate(benchmark_initial_state));
  EXPECT_EQ(stepper.cached_nodes(), 11u);
  stepper.release_before(5);
  EXPECT_EQ(stepper.cached_nodes(), 6u);
  stepper.release_factorizations();
  EXPECT_EQ(stepper.cached_nodes(), 0u);
  EXPECT_EQ(stepper.operators(7), stepper.operators(7));
}

TEST(CrankNicolson, InputChecks) {
  const FemModel model = benchmark_model(4);
  const FullOrderStepper stepper(model, 0.1);
  const Eigen::VectorXd y0 = Eigen::VectorXd::Ones(model.num_states());
  EXPECT_THROW(FullOrderStepper(model, 0.0), std::invalid_argument);
  EXPECT_THROW(stepper.integrate_state({0.0, 4, 0.2}, Eigen::MatrixXd::Zero(13, 5), y0), std::invalid_argument);
  EXPECT_THROW(stepper.integrate_state({0.05, 4, 0.1}, Eigen::MatrixXd::Zero(13, 5), y0), std::invalid_argument);
  EXPECT_THROW(stepper.integrate_state({0.0, 4, 0.1}, Eigen::MatrixXd::Zero(13, 4), y0), std::invalid_argument);
  Eigen::VectorXd bad = y0;
  bad[0] = std::nan("");
  EXPECT_THROW(stepper.integrate_state({0.0, 4, 0.1}, Eigen::MatrixXd::Zero(13, 5), bad), NumericalError);
}

TEST(Cost, PartsOfConstantControl) {
  const FemModel model = benchmark_model(6);
  const FullOrderStepper stepper(model, 0.05);
  const TimeGrid g{0.0, 20, 0.05};
  const Trajectory u(g, Eigen::MatrixXd::Ones(13, 21));
  const Trajectory y = stepper.integrate_state(g, u.values, model.interpolate(benchmark_initial_state));
  const CostParts c = eval_cost(model, y, u, 2.0);
  EXPECT_NEAR(c.penalty, 0.5 * 2.0 * 1.0 * 169.0, 1e-10);
  EXPECT_NEAR(c.smooth, stepper.smooth_cost(y), 1e-12 * c.smooth);
  EXPECT_NEAR(c.total, c.smooth + c.penalty, 1e-12 * c.total);
}

TEST(Trajectory, CsvLayout) {
  const Trajectory t({0.0, 2, 0.5}, Eigen::MatrixXd::Constant(2, 3, 1.5));
  std::ostringstream os;
  write_trajectory_csv(os, t, "y");
  EXPECT_EQ(os.str(), "t,y1,y2\n0,1.5,1.5\n0.5,1.5,1.5\n1,1.5,1.5\n");
  EXPECT_THROW(Trajectory({0.0, 3, 0.5}, Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}
