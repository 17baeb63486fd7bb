#include <sstream>

#include <gtest/gtest.h>

#include "riskplan/environment_io.hpp"
#include "riskplan/simharness.hpp"
#include "support.hpp"

using namespace riskplan;

namespace {

// Two chained steering segments from the start of an open world.
Plan two_segment_plan(const Environment& env) {
  Plan plan;
  Eigen::Vector3d from = env.start.vec();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  plan.records.push_back({0, from, cov, std::nullopt, true});
  for (const Eigen::Vector3d to : {Eigen::Vector3d(2.2, 5.4, 0.4), Eigen::Vector3d(3.3, 5.2, -0.3)}) {
    SteeringProblem p;
    p.s_init = State::from(from);
    p.s_des = State::from(to);
    const auto out = solve_steering(p);
    EXPECT_TRUE(out.ok());
    const auto beliefs = propagate_along(cov, out.value().states, out.value().inputs, {});
    for (int k = 0; k < p.horizon; ++k) {
      plan.records.back().input = out.value().inputs[k];
      plan.records.push_back({static_cast<int>(plan.records.size()), beliefs[k + 1].mean,
                              beliefs[k + 1].cov, std::nullopt, k + 1 == p.horizon});
    }
    from = to;
    cov = beliefs.back().cov;
  }
  return plan;
}

class Harness : public ::testing::Test {
 protected:
  void SetUp() override {
    env = testing_support::open_world();
    env.goal = {3.0, 3.6, 4.9, 5.5};
    plan = two_segment_plan(env);
    prepared = prepare_plan(plan, settings);
  }
  Environment env;
  Plan plan;
  ControllerSettings settings;
  PreparedPlan prepared;
};

TEST_F(Harness, NoiselessOpenLoopReplaysExactly) {
  const std::vector<Eigen::Vector3d> zero(plan.steps(), Eigen::Vector3d::Zero());
  TrialLog log;
  const TrialResult r = run_trial(prepared, ControllerKind::kOpenLoop, settings, zero, env, &log);
  EXPECT_FALSE(r.collided);
  EXPECT_TRUE(r.reached_goal);
  EXPECT_LE(r.dx_cost, 1e-9);
  EXPECT_LE((log.states.back() - plan.records.back().mean).norm(), 1e-6);
  EXPECT_EQ(r.runtime_s, 0.0);
}

TEST_F(Harness, NoiselessClosedLoopStaysClose) {
  const std::vector<Eigen::Vector3d> zero(plan.steps(), Eigen::Vector3d::Zero());
  for (auto c : {ControllerKind::kLqr, ControllerKind::kLqrm, ControllerKind::kNmpc}) {
    TrialLog log;
    const TrialResult r = run_trial(prepared, c, settings, zero, env, &log);
    EXPECT_FALSE(r.collided) << to_string(c);
    EXPECT_LE((log.states.back() - plan.records.back().mean).head<2>().norm(), 0.05) << to_string(c);
  }
}

TEST_F(Harness, CostsMatchIndependentAccumulator) {
  const auto noise = sample_noise(NoiseModel::isotropic(NoiseKind::kLaplace, 1e-3, 5), plan.steps());
  const Eigen::Matrix3d Q = settings.track.Q_delta + settings.track.Q;
  for (auto c : {ControllerKind::kOpenLoop, ControllerKind::kLqr, ControllerKind::kLqrm,
                 ControllerKind::kNmpc}) {
    TrialLog log;
    const TrialResult r = run_trial(prepared, c, settings, noise, env, &log, true);
    ASSERT_EQ(log.states.size(), log.inputs.size() + 1);
    double dx = 0, du = 0;
    for (std::size_t k = 0; k < log.inputs.size(); ++k) {
      const Eigen::Vector3d d = log.states[k] - plan.records[k].mean;
      dx += d.dot(Q * d);
      du += log.inputs[k].dot(settings.track.R * log.inputs[k]);
      EXPECT_EQ(settings.model.clip(log.inputs[k]), log.inputs[k]);
      const Eigen::Vector3d next = step(log.states[k], log.inputs[k], noise[k], settings.model);
      EXPECT_EQ(next, log.states[k + 1]);
    }
    const Eigen::Vector3d d = log.states.back() - plan.records.back().mean;
    dx += settings.track.QT_scale * d.dot(Q * d);
    EXPECT_NEAR(r.dx_cost, dx, 1e-9 * std::max(1.0, dx)) << to_string(c);
    EXPECT_NEAR(r.u_cost, du, 1e-9 * std::max(1.0, du)) << to_string(c);
    EXPECT_GT(r.runtime_s, 0.0);
  }
}

TEST_F(Harness, StopsAtFirstCollision) {
  Environment walled = env;
  walled.obstacles.push_back(Polytope::rectangle(2.5, 2.7, 0.5, 9.5));
  walled.risk.n_total = walled.constraint_count();
  const std::vector<Eigen::Vector3d> zero(plan.steps(), Eigen::Vector3d::Zero());
  TrialLog log;
  const TrialResult r = run_trial(prepared, ControllerKind::kOpenLoop, settings, zero, walled, &log);
  ASSERT_TRUE(r.collided);
  ASSERT_TRUE(r.collision_step.has_value());
  EXPECT_FALSE(r.reached_goal);
  const int hit = *r.collision_step;
  EXPECT_EQ(static_cast<int>(log.states.size()), hit + 1);
  EXPECT_FALSE(deterministic_point_check(log.states.back(), walled));
  for (int k = 0; k < hit; ++k) EXPECT_TRUE(deterministic_point_check(log.states[k], walled));
}

TEST_F(Harness, SweepIsDeterministicAcrossJobCounts) {
  SweepSpec spec;
  spec.noise_vars = {1e-4, 3.5e-3};
  spec.trials = 6;
  spec.controllers = {ControllerKind::kOpenLoop, ControllerKind::kLqr, ControllerKind::kNmpc};
  spec.base_seed = 11;
  std::ostringstream a, b;
  write_results_csv(a, run_sweep(plan, spec, env, settings));
  spec.jobs = 3;
  write_results_csv(b, run_sweep(plan, spec, env, settings));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "trial,controller,noise_var,collided,collision_step,dx_cost,u_cost,runtime_s,reached_goal,seed");
}

TEST_F(Harness, RowOrderSeedsAndOpenLoopEffort) {
  SweepSpec spec;
  spec.noise_vars = {5e-7, 1e-3, 5e-3};
  spec.trials = 5;
  spec.controllers = {ControllerKind::kOpenLoop, ControllerKind::kLqrm};
  spec.base_seed = 100;
  const auto rows = run_sweep(plan, spec, env, settings);
  ASSERT_EQ(rows.size(), 30u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int trial = static_cast<int>(i % 5);
    EXPECT_EQ(rows[i].trial, trial);
    EXPECT_EQ(rows[i].seed, 100u + trial);
    EXPECT_EQ(rows[i].noise_var, spec.noise_vars[(i / 5) % 3]);
    EXPECT_EQ(rows[i].controller, spec.controllers[i / 15]);
    EXPECT_EQ(rows[i].collided, rows[i].collision_step.has_value());
  }
  for (std::size_t i = 1; i < 15; ++i)
    if (!rows[i].collided && !rows[0].collided) EXPECT_EQ(rows[i].u_cost, rows[0].u_cost);
}

// Paired comparison: for a fixed trial every controller sees the same noise.
TEST_F(Harness, ControllersShareNoise) {
  SweepSpec spec;
  spec.noise_vars = {1e-3};
  spec.trials = 3;
  spec.controllers = {ControllerKind::kLqr, ControllerKind::kLqr};
  const auto rows = run_sweep(plan, spec, env, settings);
  for (int t = 0; t < 3; ++t) {
    EXPECT_EQ(rows[t].dx_cost, rows[3 + t].dx_cost);
    const auto noise = sample_noise(NoiseModel::isotropic(NoiseKind::kLaplace, 1e-3, t), plan.steps());
    EXPECT_EQ(run_trial(prepared, ControllerKind::kLqr, settings, noise, env).dx_cost, rows[t].dx_cost);
  }
}

TEST(Summary, ConditionalMeans) {
  std::vector<TrialResult> rows(3);
  rows[0].dx_cost = 1;
  rows[0].u_cost = 2;
  rows[0].reached_goal = true;
  rows[1].dx_cost = 3;
  rows[1].u_cost = 4;
  rows[2].collided = true;
  rows[2].collision_step = 4;
  rows[2].dx_cost = 100;
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].trials, 3);
  EXPECT_EQ(s[0].failures, 1);
  EXPECT_EQ(s[0].reached, 1);
  EXPECT_DOUBLE_EQ(s[0].mean_dx_cost, 2.0);
  EXPECT_DOUBLE_EQ(s[0].mean_u_cost, 3.0);
  std::ostringstream out;
  print_summary(out, s);
  EXPECT_NE(out.str().find("open_loop"), std::string::npos);
}

TEST(Summary, CsvRow) {
  TrialResult r;
  r.trial = 2;
  r.controller = ControllerKind::kNmpc;
  r.noise_var = 0.0035;
  r.collided = true;
  r.collision_step = 17;
  r.dx_cost = 0.1;
  r.seed = 9;
  std::ostringstream out;
  write_results_csv(out, {r});
  std::string line = out.str().substr(out.str().find('\n') + 1);
  EXPECT_EQ(line, "2,nmpc,0.0035000000000000001,1,17,0.10000000000000001,0,0,0,9\n");
}

TEST(Controllers, Names) {
  EXPECT_EQ(controller_from_string("openloop"), ControllerKind::kOpenLoop);
  for (auto c : {ControllerKind::kOpenLoop, ControllerKind::kLqr, ControllerKind::kLqrm,
                 ControllerKind::kNmpc})
    EXPECT_EQ(controller_from_string(to_string(c)), c);
  EXPECT_THROW(controller_from_string("pid"), std::invalid_argument);
}

}  // namespace
