#include "riskplan/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace riskplan {

void ModelParams::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(v_max > 0.0)) throw std::invalid_argument("v_max must be positive");
  if (!(omega_max > 0.0)) throw std::invalid_argument("omega_max must be positive");
}

Eigen::Vector2d ModelParams::clip(const Eigen::Vector2d& u) const {
  return u.cwiseMax(input_lower()).cwiseMin(input_upper());
}

Eigen::Vector3d step(const Eigen::Vector3d& x, const Eigen::Vector2d& u,
                     const Eigen::Vector3d& w, const ModelParams& p) {
  const double c = std::cos(x(2));
  const double s = std::sin(x(2));
  return {x(0) + c * u(0) * p.dt + w(0) * p.dt,
          x(1) + s * u(0) * p.dt + w(1) * p.dt,
          x(2) + u(1) * p.dt + w(2) * p.dt};
}

Jacobians jacobians(const Eigen::Vector3d& x, const Eigen::Vector2d& u,
                    const ModelParams& p) {
  const double c = std::cos(x(2));
  const double s = std::sin(x(2));
  Jacobians j;
  j.A << 1.0, 0.0, -u(0) * s * p.dt,
         0.0, 1.0, u(0) * c * p.dt,
         0.0, 0.0, 1.0;
  j.B << c * p.dt, 0.0,
         s * p.dt, 0.0,
         0.0, p.dt;
  j.E = p.dt * Eigen::Matrix3d::Identity();
  return j;
}

NoiseGenerator::NoiseGenerator(const NoiseModel& model)
    : kind_(model.kind), engine_(model.seed) {
  for (int i = 0; i < 3; ++i) {
    const double var = model.covariance(i, i);
    if (var < 0.0) throw std::invalid_argument("noise variance must be non-negative");
    // Laplace(0, b) has variance 2 b^2.
    scale_(i) = kind_ == NoiseKind::kLaplace ? std::sqrt(var / 2.0) : std::sqrt(var);
  }
}

double NoiseGenerator::uniform_open() {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

Eigen::Vector3d NoiseGenerator::next() {
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  switch (kind_) {
    case NoiseKind::kNone:
      break;
    case NoiseKind::kLaplace:
      for (int i = 0; i < 3; ++i) {
        const double u = uniform_open() - 0.5;
        const double mag = -std::log(1.0 - 2.0 * std::abs(u));
        w(i) = scale_(i) * (u < 0.0 ? -mag : mag);
      }
      break;
    case NoiseKind::kGaussian:
      for (int i = 0; i < 3; ++i) {
        // Box-Muller, one variate per pair to keep the stream simple.
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        w(i) = scale_(i) * r * std::cos(2.0 * M_PI * uniform_open());
      }
      break;
  }
  return w;
}

std::vector<Eigen::Vector3d> sample_noise(const NoiseModel& model, std::size_t count) {
  NoiseGenerator gen(model);
  std::vector<Eigen::Vector3d> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen.next());
  return out;
}

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kLaplace: return "laplace";
    case NoiseKind::kGaussian: return "gaussian";
  }
  return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::kNone;
  if (name == "laplace") return NoiseKind::kLaplace;
  if (name == "gaussian") return NoiseKind::kGaussian;
  throw std::invalid_argument("unknown noise kind '" + name + "'");
}

}  // namespace riskplan
