#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "riskplan/geometry.hpp"

namespace testing_support {

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

inline Eigen::Matrix3d random_psd(std::mt19937_64& rng, double scale = 1.0) {
  const Eigen::Matrix3d f = random_matrix(rng, 3, 3, scale);
  return f * f.transpose();
}

inline std::string env_path(const std::string& name) {
  return std::string(RISKPLAN_SOURCE_DIR) + "/envs/" + name;
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(RISKPLAN_BINARY_DIR) / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline riskplan::Environment open_world(double size = 10.0) {
  riskplan::Environment env;
  env.bounds = riskplan::Polytope::rectangle(0, size, 0, size);
  env.goal = {size - 2, size - 1, size / 2 - 0.5, size / 2 + 0.5};
  env.start = {1.0, size / 2, 0.0};
  env.risk.n_total = env.constraint_count();
  return env;
}

}  // namespace testing_support
