#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "riskplan/dynamics.hpp"
#include "riskplan/geometry.hpp"
#include "riskplan/trajopt.hpp"
#include "riskplan/unscented.hpp"

namespace riskplan {

struct PlannerConfig {
  int num_samples = 2000;
  int steer_horizon = 30;
  double max_step = 1.5;
  double gamma = 4.0;
  double w_pos = 1.0;
  double w_ang = 0.1;
  std::uint64_t seed = 0;
  Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
  /// false swaps the DR check for the deterministic point check.
  bool use_dr = true;

  void validate() const;
};

/// Everything needed to steer and propagate beliefs along an edge.
struct BeliefModel {
  ModelParams model;
  UtParams ut;
  Eigen::Matrix3d w_cov = 5e-7 * Eigen::Matrix3d::Identity();
  SolverOptions nlp;
};

struct EdgeTrajectory {
  std::vector<Belief> beliefs;          // N + 1, beliefs[0] is the parent's
  std::vector<Eigen::Vector2d> inputs;  // N
  double steer_cost = 0.0;
};

struct TreeNode {
  int id = 0;
  Belief belief;
  int parent = -1;
  EdgeTrajectory edge;  // empty for the root
  double cost = 0.0;
};

struct TreeStats {
  int samples = 0;
  int accepted = 0;
  int steer_failures = 0;
  int unsafe_edges = 0;
  int rewires = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;
  TreeStats stats;
};

/// sqrt(w_pos |dp|^2 + w_ang wrap(dtheta)^2).
double tree_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const PlannerConfig& cfg);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Belief safety under the configured check.
SafetyVerdict belief_check(const Belief& b, const Environment& env, bool use_dr);

/// Propagates `start` along fixed means and inputs. Returns N + 1 beliefs
/// whose means are `states` and whose covariances chain through the UT.
std::vector<Belief> propagate_along(const Eigen::Matrix3d& start_cov,
                                    const std::vector<Eigen::Vector3d>& states,
                                    const std::vector<Eigen::Vector2d>& inputs,
                                    const BeliefModel& bm);

/// Samples drawn up front: uniform in the bounding box with heading in
/// (-pi, pi], rejected until deterministically collision-free.
std::vector<Eigen::Vector3d> draw_samples(const Environment& env, const PlannerConfig& cfg);

Tree grow_tree(const Environment& env, const PlannerConfig& cfg, const BeliefModel& bm);

/// One plan step. `input` is empty on the terminal record; `waypoint` marks
/// tree nodes (segment boundaries).
struct PlanRecord {
  int k = 0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  std::optional<Eigen::Vector2d> input;
  bool waypoint = false;
};

struct Plan {
  std::vector<PlanRecord> records;

  int steps() const { return static_cast<int>(records.size()) - 1; }
  std::vector<Eigen::Vector3d> means() const;
  std::vector<Eigen::Vector2d> inputs() const;
};

/// Cheapest chain from the root to a node whose mean lies in the goal.
std::optional<Plan> extract_plan(const Tree& tree, const Environment& env);

/// Re-steers every segment with the fewest steps that stay feasible and
/// safe. Falls back to the input plan if a segment cannot be kept safe.
Plan shorten_plan(const Plan& plan, const Environment& env, const PlannerConfig& cfg,
                  const BeliefModel& bm);

nlohmann::json tree_to_json(const Tree& tree);

}  // namespace riskplan
