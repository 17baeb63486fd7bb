#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "riskplan/dynamics.hpp"

namespace riskplan {

/// A multiplicative perturbation: the matrix M scaled by a zero-mean scalar
/// with the given variance.
struct NoiseDirection {
  Eigen::MatrixXd M;
  double variance = 0.0;
};

/// One stage of the dynamic game
///   x+ = A x + B u + C v + E w  (+ multiplicative perturbations)
/// with stage cost [x; u; v; z]^T G [x; u; v; z].
struct GlqStage {
  Eigen::MatrixXd A, B, C, E;
  std::vector<NoiseDirection> A_noise, B_noise, C_noise;
  Eigen::MatrixXd G;
  Eigen::VectorXd z;
  Eigen::MatrixXd W;  // covariance of w; may be empty (zero)

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int c() const { return static_cast<int>(C.cols()); }
  int p() const { return static_cast<int>(z.size()); }
};

/// Terminal cost [x; z]^T G [x; z].
struct GlqTerminal {
  Eigen::MatrixXd G;
  Eigen::VectorXd z;
};

struct GlqPolicy {
  std::vector<Eigen::MatrixXd> K_u, L_u;
  std::vector<Eigen::VectorXd> e_u;
  std::vector<Eigen::MatrixXd> K_v, L_v;
  std::vector<Eigen::VectorXd> e_v;
  // Cost to go x^T P x + 2 q^T x + r, indices 0..T.
  std::vector<Eigen::MatrixXd> P;
  std::vector<Eigen::VectorXd> q;
  std::vector<double> r;
  std::vector<std::string> warnings;

  int horizon() const { return static_cast<int>(K_u.size()); }
  double cost_to_go(int k, const Eigen::VectorXd& x) const;
};

class GlqError : public std::runtime_error {
 public:
  GlqError(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Backward recursion for the finite-horizon game. Throws GlqError if the
/// minimizing block is not positive definite or the maximizing block is not
/// negative definite at some step.
GlqPolicy solve_glq(const std::vector<GlqStage>& stages, const GlqTerminal& terminal);

/// Reference trajectory for tracking: states 0..T and inputs 0..T-1.
struct Reference {
  std::vector<Eigen::Vector3d> states;
  std::vector<Eigen::Vector2d> inputs;

  int length() const { return static_cast<int>(inputs.size()); }
};

struct TrackingPenalties {
  Eigen::Matrix3d Q = Eigen::Matrix3d::Zero();
  Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
  Eigen::Matrix3d Q_delta = Eigen::Vector3d(100.0, 100.0, 10.0).asDiagonal();
  Eigen::Matrix2d R_delta = Eigen::Matrix2d::Zero();
  double QT_scale = 10.0;
  /// Adversary penalty; enables the disturbance player when set.
  std::optional<Eigen::Matrix3d> S_delta;

  void validate() const;
};

struct RobustnessSpec {
  double delta_theta_max = 3.14159265358979323846 / 6.0;
  void validate() const;
};

/// Linearizes the unicycle about the reference and lays out the tracking
/// cost with z[k] = (xbar[k], ubar[k]).
std::vector<GlqStage> build_tracking_stages(const Reference& ref, const TrackingPenalties& pen,
                                            const std::optional<RobustnessSpec>& spec,
                                            const ModelParams& model);
GlqTerminal build_tracking_terminal(const Reference& ref, const TrackingPenalties& pen);

/// Time-varying tracking gains (LQR when spec is empty, LQRm otherwise).
GlqPolicy tracking_policy(const Reference& ref, const TrackingPenalties& pen,
                          const std::optional<RobustnessSpec>& spec, const ModelParams& model);

/// u = K_u (x - xbar) + L_u (xbar, ubar) + e_u + ubar, without clipping.
Eigen::Vector2d policy_input_unclipped(const GlqPolicy& policy, int k, const Eigen::Vector3d& x,
                                       const Eigen::Vector3d& xbar, const Eigen::Vector2d& ubar);

/// Same as policy_input_unclipped, clipped to the model's input bounds.
Eigen::Vector2d apply_policy(const GlqPolicy& policy, int k, const Eigen::Vector3d& x,
                             const Eigen::Vector3d& xbar, const Eigen::Vector2d& ubar,
                             const ModelParams& model);

}  // namespace riskplan
