#pragma once

#include <vector>

#include <Eigen/Dense>

#include "riskplan/dynamics.hpp"

namespace riskplan {

/// The closed halfspace a^T s <= b over the full state (px, py, theta).
struct Halfspace {
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  double b = 0.0;

  double eval(const Eigen::Vector3d& s) const { return a.dot(s) - b; }
};

struct Polytope {
  std::vector<Halfspace> faces;

  bool contains(const Eigen::Vector3d& s) const;
  std::size_t size() const { return faces.size(); }

  /// Axis-aligned rectangle expanded into four faces.
  static Polytope rectangle(double xmin, double xmax, double ymin, double ymax);
};

struct GoalRegion {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

  bool contains(const Eigen::Vector3d& s) const {
    return s(0) >= xmin && s(0) <= xmax && s(1) >= ymin && s(1) <= ymax;
  }
};

/// Plan-level failure budget split evenly over time steps and constraints.
struct RiskBudget {
  double beta = 0.1;
  int t_max = 1000;
  int n_total = 1;

  double stage_risk() const { return beta / (t_max + 1); }
  double constraint_risk() const { return stage_risk() / n_total; }
  void validate() const;
};

struct Environment {
  Polytope bounds;
  std::vector<Polytope> obstacles;
  GoalRegion goal;
  State start;
  RiskBudget risk;

  int constraint_count() const;
  /// Axis-aligned box enclosing the bounds polytope in (px, py).
  Eigen::Vector4d bounding_box() const;
};

struct SafetyVerdict {
  bool safe = true;
  int obstacle = -1;  // -1 means the environment bounds
  int face = -1;

  explicit operator bool() const { return safe; }
};

SafetyVerdict deterministic_point_check(const Eigen::Vector3d& s, const Environment& env);

/// Tightening added to a halfspace so that a^T s <= b holds with probability
/// at least 1 - alpha_prime for every distribution with covariance sigma.
double dr_padding(const Eigen::Vector3d& a, const Eigen::Matrix3d& sigma, double alpha_prime);

/// Same padding with a precomputed factor S (S S^T = sigma).
double dr_padding_factored(const Eigen::Vector3d& a, const Eigen::Matrix3d& factor,
                           double alpha_prime);

SafetyVerdict dr_point_check(const Eigen::Vector3d& mean, const Eigen::Matrix3d& sigma,
                             const Environment& env, const RiskBudget& budget);

/// Signed deterministic clearance: the largest margin by which s satisfies
/// every bounds face and escapes every obstacle through its best face.
/// Negative inside an obstacle or outside the bounds.
double clearance(const Eigen::Vector3d& s, const Environment& env);

/// Clearance from obstacles only, ignoring the environment bounds.
double obstacle_clearance(const Eigen::Vector3d& s, const Environment& env);

}  // namespace riskplan
