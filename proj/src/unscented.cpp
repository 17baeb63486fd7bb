#include "riskplan/unscented.hpp"

#include <cmath>
#include <stdexcept>

namespace riskplan {

void UtParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("ut.alpha must lie in (0, 1]");
  if (!(kDim + lambda() > 0.0)) throw std::invalid_argument("ut parameters give n + lambda <= 0");
}

SigmaPoints sigma_points(const Belief& b, const UtParams& p) {
  constexpr int n = UtParams::kDim;
  const double lambda = p.lambda();
  const double spread = n + lambda;
  if (!(spread > 0.0)) throw std::invalid_argument("n + lambda must be positive");

  const Eigen::Matrix3d root = covariance_factor(spread * b.cov);

  SigmaPoints sp;
  sp.points[0] = b.mean;
  sp.mean_weights[0] = lambda / spread;
  sp.cov_weights[0] = lambda / spread + 1.0 - p.alpha * p.alpha + p.beta;
  const double w = 1.0 / (2.0 * spread);
  for (int i = 0; i < n; ++i) {
    sp.points[1 + i] = b.mean + root.col(i);
    sp.points[1 + n + i] = b.mean - root.col(i);
    sp.mean_weights[1 + i] = sp.mean_weights[1 + n + i] = w;
    sp.cov_weights[1 + i] = sp.cov_weights[1 + n + i] = w;
  }
  return sp;
}

Belief propagate(const Belief& b, const Eigen::Vector2d& u, const UtParams& p,
                 const ModelParams& model, const Eigen::Matrix3d& w_cov) {
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  Belief out = unscented_transform(
      b, p, [&](const Eigen::Vector3d& x) { return step(x, u, zero, model); });
  out.cov += model.dt * model.dt * symmetrized(w_cov);
  return out;
}

}  // namespace riskplan
