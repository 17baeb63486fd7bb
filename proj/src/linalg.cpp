#include "riskplan/linalg.hpp"

#include <cmath>
#include <sstream>

namespace riskplan {

Eigen::Matrix3d covariance_factor(const Eigen::Matrix3d& cov) {
  if (!cov.allFinite()) throw InvalidCovariance("non-finite entries");
  const Eigen::Matrix3d sym = symmetrized(cov);
  Eigen::LLT<Eigen::Matrix3d> llt(sym);
  if (llt.info() == Eigen::Success) {
    const Eigen::Matrix3d l = llt.matrixL();
    if (l.allFinite()) return l;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sym);
  Eigen::Vector3d values = eig.eigenvalues();
  for (int i = 0; i < 3; ++i) {
    if (values(i) < -kPsdClampTolerance) {
      std::ostringstream msg;
      msg << "eigenvalue " << values(i) << " below -" << kPsdClampTolerance;
      throw InvalidCovariance(msg.str());
    }
    values(i) = std::sqrt(std::max(values(i), 0.0));
  }
  return eig.eigenvectors() * values.asDiagonal();
}

Eigen::MatrixXd weight_root(const Eigen::MatrixXd& weight) {
  const Eigen::MatrixXd sym = 0.5 * (weight + weight.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  Eigen::VectorXd values = eig.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < -kPsdClampTolerance * std::max(1.0, values.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("weight matrix is not positive semidefinite");
    }
    values(i) = std::sqrt(std::max(values(i), 0.0));
  }
  return values.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace riskplan
