#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "riskplan/dynamics.hpp"
#include "riskplan/geometry.hpp"

namespace riskplan {

enum class FailureKind { kInfeasible, kMaxIter, kNumerical };

struct Failure {
  FailureKind kind;
  std::string message;
};

const char* to_string(FailureKind kind);

/// Either a value or a Failure.
template <typename T>
class Outcome {
 public:
  Outcome(T value) : data_(std::move(value)) {}          // NOLINT(implicit)
  Outcome(Failure failure) : data_(std::move(failure)) {} // NOLINT(implicit)

  bool ok() const { return std::holds_alternative<T>(data_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(data_); }
  T& value() & { return std::get<T>(data_); }
  T&& value() && { return std::get<T>(std::move(data_)); }
  const Failure& failure() const { return std::get<Failure>(data_); }

 private:
  std::variant<T, Failure> data_;
};

struct SolverOptions {
  double tol_endpoint = 1e-6;
  double tol_defect = 1e-6;
  /// Projected-gradient threshold on the augmented objective.
  double tol_optimality = 1e-6;
  int max_outer = 100;
  int max_inner = 50;
  /// Cap on inner iterations summed over all outer passes; 0 disables it.
  int max_total_iterations = 0;
  double initial_penalty = 1e4;
  double max_penalty = 1e10;
};

struct SolveStats {
  int outer_iterations = 0;
  int inner_iterations = 0;
  double max_violation = 0.0;
  double projected_gradient = 0.0;
  /// Equality multipliers in constraint order: defects k = 0..N-1 (three
  /// each), then the terminal constraint when present.
  Eigen::VectorXd eq_multipliers;
  Eigen::VectorXd ineq_multipliers;
  double penalty = 0.0;
};

/// Two-point boundary value problem between tree states.
struct SteeringProblem {
  State s_init;
  State s_des;
  int horizon = 30;
  Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
  ModelParams model;
};

struct SteeredTrajectory {
  std::vector<Eigen::Vector3d> states;  // horizon + 1
  std::vector<Eigen::Vector2d> inputs;  // horizon
  double cost = 0.0;                    // sum of u^T R u
  SolveStats stats;
};

Outcome<SteeredTrajectory> solve_steering(const SteeringProblem& problem,
                                          const SolverOptions& options = {});

/// Straight-line initial guess used by solve_steering.
SteeredTrajectory steering_initial_guess(const SteeringProblem& problem);

/// Finite-horizon reference tracking problem solved once per NMPC step.
struct TrackingProblem {
  std::vector<Eigen::Vector3d> ref_states;  // horizon + 1, ref_states[0] pairs with x_now
  std::vector<Eigen::Vector2d> ref_inputs;  // horizon
  Eigen::Vector3d x_now = Eigen::Vector3d::Zero();
  Eigen::Matrix3d Q = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d Q_T = Eigen::Matrix3d::Identity();
  Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
  Polytope env_bounds;
  ModelParams model;

  int horizon() const { return static_cast<int>(ref_inputs.size()); }
};

struct TrackingSolution {
  std::vector<Eigen::Vector3d> states;  // predicted, states[0] == x_now
  std::vector<Eigen::Vector2d> inputs;
  double cost = 0.0;
  SolveStats stats;

  Eigen::Vector2d first_input() const { return inputs.front(); }
};

/// Solves the tracking NLP. `warm_start` (if given) must have the problem's
/// horizon; otherwise the reference itself seeds the solver.
Outcome<TrackingSolution> solve_tracking(const TrackingProblem& problem,
                                         const TrackingSolution* warm_start,
                                         const SolverOptions& options);

/// Drops the first step of a solution and repeats the last input, rolling
/// the dynamics forward to keep the guess consistent.
TrackingSolution shift_solution(const TrackingSolution& previous, const ModelParams& model);

/// Maximum of |x[k+1] - step(x[k], u[k], 0)| over the trajectory.
double max_defect(const std::vector<Eigen::Vector3d>& states,
                  const std::vector<Eigen::Vector2d>& inputs, const ModelParams& model);

}  // namespace riskplan
