#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "riskplan/trajopt.hpp"

using namespace riskplan;

namespace {

SteeringProblem problem(State a, State b, int N = 30) {
  SteeringProblem p;
  p.s_init = a;
  p.s_des = b;
  p.horizon = N;
  return p;
}

double defect(const SteeredTrajectory& t, const ModelParams& m) {
  double worst = 0.0;
  for (std::size_t k = 0; k < t.inputs.size(); ++k) {
    const Eigen::Vector3d e = t.states[k + 1] - step(t.states[k], t.inputs[k], Eigen::Vector3d::Zero(), m);
    worst = std::max(worst, e.cwiseAbs().maxCoeff());
  }
  return worst;
}

void expect_valid(const SteeringProblem& p, const SteeredTrajectory& t) {
  ASSERT_EQ(t.states.size(), static_cast<std::size_t>(p.horizon + 1));
  ASSERT_EQ(t.inputs.size(), static_cast<std::size_t>(p.horizon));
  EXPECT_EQ(t.states.front(), p.s_init.vec());
  EXPECT_LE((t.states.back() - p.s_des.vec()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(defect(t, p.model), 1e-6);
  double cost = 0;
  for (const auto& u : t.inputs) {
    EXPECT_LE(std::abs(u(0)), p.model.v_max + 1e-12);
    EXPECT_LE(std::abs(u(1)), p.model.omega_max + 1e-12);
    cost += u.dot(p.R * u);
  }
  EXPECT_NEAR(cost, t.cost, 1e-12);
}

TEST(Steering, ZeroMove) {
  const auto p = problem({0, 0, 0}, {0, 0, 0});
  const auto out = solve_steering(p);
  ASSERT_TRUE(out.ok());
  EXPECT_NEAR(out.value().cost, 0.0, 1e-12);
  for (const auto& u : out.value().inputs) EXPECT_LE(u.norm(), 1e-9);
}

TEST(Steering, StraightLineCost) {
  const auto p = problem({0, 0, 0}, {1, 0, 0});
  const auto out = solve_steering(p);
  ASSERT_TRUE(out.ok()) << out.failure().message;
  expect_valid(p, out.value());
  EXPECT_NEAR(out.value().cost, 5.0 / 6.0, 1e-3);
  for (const auto& u : out.value().inputs) {
    EXPECT_NEAR(u(0), 1.0 / 6.0, 1e-4);
    EXPECT_NEAR(u(1), 0.0, 1e-4);
  }
}

TEST(Steering, OutOfReachIsInfeasible) {
  const auto out = solve_steering(problem({0, 0, 0}, {10, 0, 0}));
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(out.failure().kind, FailureKind::kInfeasible);
}

TEST(Steering, LateralMove) {
  const auto p = problem({0, 0, 0}, {0, 1, 0});
  const auto out = solve_steering(p);
  ASSERT_TRUE(out.ok()) << out.failure().message;
  expect_valid(p, out.value());
}

TEST(Steering, RandomCasesPassDefectValidator) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1.2, 1.2), th(-3, 3);
  int solved = 0;
  for (int i = 0; i < 30; ++i) {
    const auto p = problem({0, 0, th(rng)}, {d(rng), d(rng), th(rng)});
    const auto out = solve_steering(p);
    if (!out.ok()) continue;
    ++solved;
    expect_valid(p, out.value());
  }
  EXPECT_GE(solved, 25);
}

TEST(Steering, Deterministic) {
  const auto p = problem({0.3, -0.2, 0.4}, {1.1, 0.6, -0.8});
  const auto a = solve_steering(p), b = solve_steering(p);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a.value().states, b.value().states);
  EXPECT_EQ(a.value().inputs, b.value().inputs);
  EXPECT_EQ(a.value().cost, b.value().cost);
}

TEST(Steering, RigidMotionInvariance) {
  const auto base = problem({0, 0, 0.2}, {0.9, 0.5, 1.0});
  const auto ref = solve_steering(base);
  ASSERT_TRUE(ref.ok());
  const double phi = 0.7;
  const Eigen::Rotation2Dd rot(phi);
  const Eigen::Vector2d shift(3.0, -2.0);
  auto move = [&](const State& s) {
    const Eigen::Vector2d p = rot * Eigen::Vector2d(s.px, s.py) + shift;
    return State{p(0), p(1), s.theta + phi};
  };
  auto translated = base;
  translated.s_init = {base.s_init.px + 3, base.s_init.py - 2, base.s_init.theta};
  translated.s_des = {base.s_des.px + 3, base.s_des.py - 2, base.s_des.theta};
  auto rotated = base;
  rotated.s_init = move(base.s_init);
  rotated.s_des = move(base.s_des);
  for (const auto& p : {translated, rotated}) {
    const auto out = solve_steering(p);
    ASSERT_TRUE(out.ok());
    EXPECT_NEAR(out.value().cost, ref.value().cost, 1e-6);
  }
}

// Rebuilds the augmented objective from the reported multipliers and checks
// stationarity by central differences.
TEST(Steering, FirstOrderOptimality) {
  const auto p = problem({0, 0, 0}, {0.8, 0.4, 0.6});
  const auto out = solve_steering(p);
  ASSERT_TRUE(out.ok());
  const auto& t = out.value();
  const int N = p.horizon;
  const Eigen::VectorXd& lam = t.stats.eq_multipliers;
  const double mu = t.stats.penalty;
  ASSERT_EQ(lam.size(), 3 * N + 3);

  // z = [u_0, x_1, u_1, x_2, ..., u_{N-1}, x_N]
  Eigen::VectorXd z(5 * N);
  for (int k = 0; k < N; ++k) {
    z.segment<2>(5 * k) = t.inputs[k];
    z.segment<3>(5 * k + 2) = t.states[k + 1];
  }
  auto phi = [&](const Eigen::VectorXd& v) {
    double f = 0;
    Eigen::Vector3d prev = p.s_init.vec();
    for (int k = 0; k < N; ++k) {
      const Eigen::Vector2d u = v.segment<2>(5 * k);
      const Eigen::Vector3d x = v.segment<3>(5 * k + 2);
      f += u.dot(p.R * u);
      const Eigen::Vector3d c = x - step(prev, u, Eigen::Vector3d::Zero(), p.model);
      f += 0.5 * mu * (c + lam.segment<3>(3 * k) / mu).squaredNorm();
      prev = x;
    }
    const Eigen::Vector3d c = prev - p.s_des.vec();
    f += 0.5 * mu * (c + lam.segment<3>(3 * N) / mu).squaredNorm();
    return f;
  };
  const double h = 1e-7;
  double pg = 0;
  for (int i = 0; i < z.size(); ++i) {
    Eigen::VectorXd a = z, b = z;
    a(i) += h;
    b(i) -= h;
    const double g = (phi(a) - phi(b)) / (2 * h);
    const int slot = i % 5;
    if (slot < 2) {
      const double lo = slot == 0 ? -p.model.v_max : -p.model.omega_max;
      const double hi = -lo;
      pg = std::max(pg, std::abs(z(i) - std::clamp(z(i) - g, lo, hi)));
    } else {
      pg = std::max(pg, std::abs(g));
    }
  }
  EXPECT_LE(pg, 1e-5);
}

TEST(Steering, InitialGuessIsClippedAndAnchored) {
  const auto p = problem({0, 0, 0}, {2.5, 0, 3.0});
  const auto g = steering_initial_guess(p);
  EXPECT_EQ(g.states.front(), p.s_init.vec());
  EXPECT_EQ(g.states.back(), p.s_des.vec());
  for (const auto& u : g.inputs) EXPECT_EQ(p.model.clip(u), u);
}

TEST(Steering, MaxDefectHelper) {
  std::vector<Eigen::Vector3d> xs{{0, 0, 0}, {0.1, 0, 0}};
  std::vector<Eigen::Vector2d> us{{0.5, 0}};
  EXPECT_NEAR(max_defect(xs, us, {}), 0.0, 1e-15);
  xs[1](1) = 1e-3;
  EXPECT_NEAR(max_defect(xs, us, {}), 1e-3, 1e-15);
}

// --- tracking -------------------------------------------------------------

struct RefTraj {
  std::vector<Eigen::Vector3d> x;
  std::vector<Eigen::Vector2d> u;
};

RefTraj rollout(Eigen::Vector3d x0, Eigen::Vector2d u, int n) {
  RefTraj r;
  r.x.push_back(x0);
  for (int k = 0; k < n; ++k) {
    r.u.push_back(u);
    r.x.push_back(step(r.x.back(), u, Eigen::Vector3d::Zero(), {}));
  }
  return r;
}

TrackingProblem window(const RefTraj& r, int t, int H, const Eigen::Vector3d& x_now) {
  TrackingProblem p;
  p.Q = Eigen::Vector3d(100, 100, 10).asDiagonal();
  p.Q_T = 10 * p.Q;
  p.R = Eigen::Matrix2d::Identity();
  p.env_bounds = Polytope::rectangle(-50, 50, -50, 50);
  p.x_now = x_now;
  const int T = static_cast<int>(r.u.size());
  for (int k = 0; k <= H; ++k) p.ref_states.push_back(r.x[std::min(t + k, T)]);
  for (int k = 0; k < H; ++k)
    p.ref_inputs.push_back(t + k < T ? r.u[t + k] : Eigen::Vector2d::Zero());
  return p;
}

TEST(Tracking, StationaryReferenceGivesZeroInput) {
  const RefTraj r = rollout({1, 1, 0}, {0, 0}, 10);
  const auto out = solve_tracking(window(r, 0, 10, r.x[0]), nullptr, {});
  ASSERT_TRUE(out.ok());
  EXPECT_LE(out.value().first_input().norm(), 1e-6);
}

TEST(Tracking, ClosedLoopFollowsFeasibleReference) {
  const RefTraj r = rollout({0, 0, 0}, {0.3, 0.4}, 40);
  Eigen::Vector3d x = r.x[0];
  const TrackingSolution* warm = nullptr;
  TrackingSolution prev;
  SolverOptions opt;
  for (int t = 0; t < 30; ++t) {
    const auto p = window(r, t, 10, x);
    const auto out = solve_tracking(p, warm, opt);
    ASSERT_TRUE(out.ok()) << t << " " << out.failure().message;
    x = step(x, out.value().first_input(), Eigen::Vector3d::Zero(), {});
    prev = shift_solution(out.value(), {});
    warm = &prev;
  }
  EXPECT_LE((x - r.x[30]).norm(), 0.05);
}

TEST(Tracking, LateralOffsetShrinksOverHorizon) {
  const RefTraj r = rollout({0, 0, 0}, {0.3, 0}, 20);
  const auto out = solve_tracking(window(r, 0, 10, r.x[0] + Eigen::Vector3d(0, 0.1, 0)), nullptr, {});
  ASSERT_TRUE(out.ok());
  const auto& xs = out.value().states;
  EXPECT_EQ(xs.front(), r.x[0] + Eigen::Vector3d(0, 0.1, 0));
  for (std::size_t k = 1; k < xs.size(); ++k)
    EXPECT_LE(std::abs(xs[k](1)), std::abs(xs[k - 1](1)) + 1e-9) << k;
  EXPECT_LE(max_defect(xs, out.value().inputs, {}), 1e-6);
}

TEST(Tracking, ShiftKeepsHorizonAndConsistency) {
  const RefTraj r = rollout({0, 0, 0}, {0.3, 0.2}, 20);
  const auto out = solve_tracking(window(r, 0, 10, r.x[0]), nullptr, {});
  ASSERT_TRUE(out.ok());
  const auto s = shift_solution(out.value(), {});
  EXPECT_EQ(s.inputs.size(), out.value().inputs.size());
  EXPECT_EQ(s.states.size(), out.value().states.size());
  EXPECT_LE(max_defect(s.states, s.inputs, {}), 1e-6);
}

TEST(Tracking, StaysInsideEnvironmentBounds) {
  const RefTraj r = rollout({0, 0, 0}, {0.5, 0}, 20);
  auto p = window(r, 0, 10, r.x[0]);
  p.env_bounds = Polytope::rectangle(-1, 0.5, -1, 1);
  const auto out = solve_tracking(p, nullptr, {});
  ASSERT_TRUE(out.ok());
  for (const auto& x : out.value().states) EXPECT_LE(x(0), 0.5 + 1e-6);
}

}  // namespace
