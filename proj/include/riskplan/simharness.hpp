#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "riskplan/dynamics.hpp"
#include "riskplan/geometry.hpp"
#include "riskplan/glq.hpp"
#include "riskplan/planner.hpp"
#include "riskplan/trajopt.hpp"

namespace riskplan {

enum class ControllerKind { kOpenLoop, kLqr, kLqrm, kNmpc };

const char* to_string(ControllerKind kind);
/// Accepts open_loop/openloop, lqr, lqrm, nmpc.
ControllerKind controller_from_string(const std::string& name);

struct ControllerSettings {
  ModelParams model;
  TrackingPenalties track;
  RobustnessSpec lqrm;
  int nmpc_horizon = 10;
  SolverOptions nmpc_solver = [] {
    SolverOptions o;
    o.max_total_iterations = 30;
    o.max_inner = 30;
    o.max_outer = 30;
    return o;
  }();
};

/// Reference and gains shared by every trial on one plan.
struct PreparedPlan {
  Reference ref;
  std::shared_ptr<const GlqPolicy> lqr;
  std::shared_ptr<const GlqPolicy> lqrm;
};

PreparedPlan prepare_plan(const Plan& plan, const ControllerSettings& settings);

struct TrialResult {
  int trial = 0;
  ControllerKind controller = ControllerKind::kOpenLoop;
  double noise_var = 0.0;
  bool collided = false;
  std::optional<int> collision_step;
  double dx_cost = 0.0;
  double u_cost = 0.0;
  double runtime_s = 0.0;
  bool reached_goal = false;
  std::uint64_t seed = 0;
  int solver_fallbacks = 0;
};

/// Realized trajectory of one trial; states has one more entry than inputs.
struct TrialLog {
  std::vector<Eigen::Vector3d> states;
  std::vector<Eigen::Vector2d> inputs;
};

/// Closed-loop rollout under a fixed disturbance sequence (one entry per
/// plan step). Stops at the first realized state in collision.
TrialResult run_trial(const PreparedPlan& prepared, ControllerKind controller,
                      const ControllerSettings& settings, const std::vector<Eigen::Vector3d>& noise,
                      const Environment& env, TrialLog* log = nullptr, bool timing = false);

struct SweepSpec {
  std::vector<double> noise_vars;
  int trials = 100;
  std::vector<ControllerKind> controllers;
  std::uint64_t base_seed = 0;
  NoiseKind noise_kind = NoiseKind::kLaplace;
  int jobs = 1;
  bool timing = false;

  void validate() const;
};

/// Rows ordered by controller, then noise level, then trial. Trial t uses
/// seed base_seed + t for every controller and level.
std::vector<TrialResult> run_sweep(const Plan& plan, const SweepSpec& spec, const Environment& env,
                                   const ControllerSettings& settings);

void write_results_csv(std::ostream& out, const std::vector<TrialResult>& rows);

struct SummaryRow {
  ControllerKind controller = ControllerKind::kOpenLoop;
  double noise_var = 0.0;
  int trials = 0;
  int failures = 0;
  int reached = 0;
  // Means over collision-free trials; NaN when every trial failed.
  double mean_dx_cost = 0.0;
  double mean_u_cost = 0.0;
  double mean_runtime_s = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& rows);
void print_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace riskplan
