#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace riskplan {

/// Unicycle pose. Heading lives on the real line and is never wrapped here.
struct State {
  double px = 0.0;
  double py = 0.0;
  double theta = 0.0;

  Eigen::Vector3d vec() const { return {px, py, theta}; }
  static State from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
};

struct ControlInput {
  double v = 0.0;
  double omega = 0.0;

  Eigen::Vector2d vec() const { return {v, omega}; }
  static ControlInput from(const Eigen::Vector2d& u) { return {u(0), u(1)}; }
};

struct ModelParams {
  double dt = 0.2;
  double v_max = 0.5;
  double omega_max = 3.14159265358979323846;

  void validate() const;
  Eigen::Vector2d input_lower() const { return {-v_max, -omega_max}; }
  Eigen::Vector2d input_upper() const { return {v_max, omega_max}; }
  Eigen::Vector2d clip(const Eigen::Vector2d& u) const;
};

/// Forward-Euler unicycle step; the disturbance enters scaled by dt.
Eigen::Vector3d step(const Eigen::Vector3d& x, const Eigen::Vector2d& u,
                     const Eigen::Vector3d& w, const ModelParams& p);

inline State step(const State& x, const ControlInput& u, const Eigen::Vector3d& w,
                  const ModelParams& p) {
  return State::from(step(x.vec(), u.vec(), w, p));
}

struct Jacobians {
  Eigen::Matrix3d A;                 // d step / d x
  Eigen::Matrix<double, 3, 2> B;     // d step / d u
  Eigen::Matrix3d E;                 // d step / d w
};

Jacobians jacobians(const Eigen::Vector3d& x, const Eigen::Vector2d& u,
                    const ModelParams& p);

enum class NoiseKind { kNone, kLaplace, kGaussian };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kLaplace;
  Eigen::Matrix3d covariance = 5e-7 * Eigen::Matrix3d::Identity();
  std::uint64_t seed = 0;

  static NoiseModel isotropic(NoiseKind kind, double variance, std::uint64_t seed) {
    return {kind, variance * Eigen::Matrix3d::Identity(), seed};
  }
};

/// Seeded per-trial disturbance source. Each component is drawn independently
/// with the variance given by the covariance diagonal.
class NoiseGenerator {
 public:
  explicit NoiseGenerator(const NoiseModel& model);

  Eigen::Vector3d next();

 private:
  double uniform_open();  // (0, 1)

  NoiseKind kind_;
  Eigen::Vector3d scale_;
  std::mt19937_64 engine_;
};

std::vector<Eigen::Vector3d> sample_noise(const NoiseModel& model, std::size_t count);

const char* to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

}  // namespace riskplan
