#pragma once

#include <array>

#include <Eigen/Dense>

#include "riskplan/dynamics.hpp"
#include "riskplan/linalg.hpp"

namespace riskplan {

/// Sigma-point spread parameters. The defaults (alpha 1, beta 2, kappa 0)
/// give lambda = 0.
struct UtParams {
  double alpha = 1.0;
  double beta = 2.0;
  double kappa = 0.0;

  static constexpr int kDim = 3;

  double lambda() const { return alpha * alpha * (kDim + kappa) - kDim; }
  void validate() const;
};

struct Belief {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
};

struct SigmaPoints {
  static constexpr int kCount = 2 * UtParams::kDim + 1;

  std::array<Eigen::Vector3d, kCount> points;
  std::array<double, kCount> mean_weights;
  std::array<double, kCount> cov_weights;
};

SigmaPoints sigma_points(const Belief& b, const UtParams& p);

/// Pushes the sigma points of `b` through `map` and returns the weighted
/// sample mean and covariance (without any additive noise term).
template <typename Map>
Belief unscented_transform(const Belief& b, const UtParams& p, Map&& map) {
  const SigmaPoints sp = sigma_points(b, p);
  std::array<Eigen::Vector3d, SigmaPoints::kCount> images;
  Belief out;
  for (int i = 0; i < SigmaPoints::kCount; ++i) {
    images[i] = map(sp.points[i]);
    out.mean += sp.mean_weights[i] * images[i];
  }
  for (int i = 0; i < SigmaPoints::kCount; ++i) {
    const Eigen::Vector3d d = images[i] - out.mean;
    out.cov += sp.cov_weights[i] * d * d.transpose();
  }
  out.cov = symmetrized(out.cov);
  return out;
}

/// One-step moment propagation through the unicycle. The disturbance enters
/// the dynamics as w * dt, so the additive covariance term is dt^2 * w_cov.
Belief propagate(const Belief& b, const Eigen::Vector2d& u, const UtParams& p,
                 const ModelParams& model, const Eigen::Matrix3d& w_cov);

}  // namespace riskplan
