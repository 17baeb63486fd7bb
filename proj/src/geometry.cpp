#include "riskplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "riskplan/linalg.hpp"

namespace riskplan {

bool Polytope::contains(const Eigen::Vector3d& s) const {
  return std::all_of(faces.begin(), faces.end(),
                     [&](const Halfspace& h) { return h.eval(s) <= 0.0; });
}

Polytope Polytope::rectangle(double xmin, double xmax, double ymin, double ymax) {
  Polytope p;
  p.faces.push_back({{1.0, 0.0, 0.0}, xmax});
  p.faces.push_back({{-1.0, 0.0, 0.0}, -xmin});
  p.faces.push_back({{0.0, 1.0, 0.0}, ymax});
  p.faces.push_back({{0.0, -1.0, 0.0}, -ymin});
  return p;
}

void RiskBudget::validate() const {
  if (!(beta > 0.0 && beta <= 0.5)) throw std::invalid_argument("risk.beta must lie in (0, 0.5]");
  if (t_max < 1) throw std::invalid_argument("risk.t_max must be at least 1");
  if (n_total < 1) throw std::invalid_argument("constraint count must be positive");
}

int Environment::constraint_count() const {
  std::size_t n = bounds.size();
  for (const auto& ob : obstacles) n += ob.size();
  return static_cast<int>(n);
}

Eigen::Vector4d Environment::bounding_box() const {
  // Vertices of the (px, py) projection: pairwise face intersections that
  // satisfy every face.
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  const auto& f = bounds.faces;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      Eigen::Matrix2d m;
      m << f[i].a(0), f[i].a(1), f[j].a(0), f[j].a(1);
      if (std::abs(m.determinant()) < 1e-12) continue;
      const Eigen::Vector2d p = m.inverse() * Eigen::Vector2d(f[i].b, f[j].b);
      const Eigen::Vector3d s(p(0), p(1), 0.0);
      bool inside = true;
      for (const auto& h : f) inside = inside && h.eval(s) <= 1e-9;
      if (!inside) continue;
      xmin = std::min(xmin, p(0));
      xmax = std::max(xmax, p(0));
      ymin = std::min(ymin, p(1));
      ymax = std::max(ymax, p(1));
    }
  }
  return {xmin, xmax, ymin, ymax};
}

SafetyVerdict deterministic_point_check(const Eigen::Vector3d& s, const Environment& env) {
  for (std::size_t j = 0; j < env.bounds.faces.size(); ++j) {
    if (env.bounds.faces[j].eval(s) > 0.0) return {false, -1, static_cast<int>(j)};
  }
  for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
    const auto& faces = env.obstacles[i].faces;
    const bool escaped = std::any_of(faces.begin(), faces.end(),
                                     [&](const Halfspace& h) { return h.eval(s) >= 0.0; });
    if (!escaped) return {false, static_cast<int>(i), -1};
  }
  return {};
}

double dr_padding_factored(const Eigen::Vector3d& a, const Eigen::Matrix3d& factor,
                           double alpha_prime) {
  return std::sqrt((1.0 - alpha_prime) / alpha_prime) * (factor.transpose() * a).norm();
}

double dr_padding(const Eigen::Vector3d& a, const Eigen::Matrix3d& sigma, double alpha_prime) {
  if (!(alpha_prime > 0.0 && alpha_prime <= 0.5)) {
    throw std::invalid_argument("alpha_prime must lie in (0, 0.5]");
  }
  return dr_padding_factored(a, covariance_factor(sigma), alpha_prime);
}

SafetyVerdict dr_point_check(const Eigen::Vector3d& mean, const Eigen::Matrix3d& sigma,
                             const Environment& env, const RiskBudget& budget) {
  const double alpha_prime = budget.constraint_risk();
  const Eigen::Matrix3d factor = covariance_factor(sigma);
  for (std::size_t j = 0; j < env.bounds.faces.size(); ++j) {
    const auto& h = env.bounds.faces[j];
    if (h.eval(mean) > -dr_padding_factored(h.a, factor, alpha_prime)) {
      return {false, -1, static_cast<int>(j)};
    }
  }
  for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
    const auto& faces = env.obstacles[i].faces;
    // One face suffices: P(outside O_i) >= max_j P(a_j^T s >= b_j).
    const bool escaped = std::any_of(faces.begin(), faces.end(), [&](const Halfspace& h) {
      return h.eval(mean) >= dr_padding_factored(h.a, factor, alpha_prime);
    });
    if (!escaped) return {false, static_cast<int>(i), -1};
  }
  return {};
}

double obstacle_clearance(const Eigen::Vector3d& s, const Environment& env) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& ob : env.obstacles) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& h : ob.faces) best = std::max(best, h.eval(s) / h.a.norm());
    worst = std::min(worst, best);
  }
  return worst;
}

double clearance(const Eigen::Vector3d& s, const Environment& env) {
  double worst = obstacle_clearance(s, env);
  for (const auto& h : env.bounds.faces) worst = std::min(worst, -h.eval(s) / h.a.norm());
  return worst;
}

}  // namespace riskplan
