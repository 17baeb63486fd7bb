#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace riskplan {

/// Raised when a matrix that must be a covariance is not symmetric PSD.
class InvalidCovariance : public std::runtime_error {
 public:
  explicit InvalidCovariance(const std::string& what)
      : std::runtime_error("invalid covariance: " + what) {}
};

/// Eigenvalues in [-kPsdClampTolerance, 0] are treated as zero.
inline constexpr double kPsdClampTolerance = 1e-10;

inline Eigen::Matrix3d symmetrized(const Eigen::Matrix3d& m) {
  return 0.5 * (m + m.transpose());
}

/// Returns S with S * S^T equal to the symmetrized covariance. Tries a
/// Cholesky factorization first and falls back to a clamped eigen
/// decomposition for singular or slightly indefinite input.
Eigen::Matrix3d covariance_factor(const Eigen::Matrix3d& cov);

/// Returns L with L^T * L == Q for a symmetric PSD weight matrix, so that a
/// quadratic form x^T Q x can be written as the squared norm of L x.
Eigen::MatrixXd weight_root(const Eigen::MatrixXd& weight);

}  // namespace riskplan
