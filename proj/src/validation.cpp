#include "riskplan/validation.hpp"

#include <cmath>
#include <sstream>

#include "riskplan/unscented.hpp"

namespace riskplan {
namespace {

ValidationReport fail(int record, const char* check, const std::string& message) {
  return {false, record, check, message};
}

// Tightened check written against the quadratic form a^T S a, independent of
// the factorization used while planning.
bool tightened_safe(const Eigen::Vector3d& mean, const Eigen::Matrix3d& cov, const Environment& env,
                    std::string* why) {
  const double ap = env.risk.beta / (env.risk.t_max + 1.0) / env.constraint_count();
  const double coef = std::sqrt((1.0 - ap) / ap);
  auto pad = [&](const Halfspace& h) {
    return coef * std::sqrt(std::max(0.0, h.a.dot(cov * h.a)));
  };
  for (std::size_t j = 0; j < env.bounds.faces.size(); ++j) {
    const Halfspace& h = env.bounds.faces[j];
    if (h.a.dot(mean) > h.b - pad(h)) {
      *why = "bounds face " + std::to_string(j) + " violated with padding";
      return false;
    }
  }
  for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
    bool escaped = false;
    for (const Halfspace& h : env.obstacles[i].faces) {
      if (h.a.dot(mean) >= h.b + pad(h)) {
        escaped = true;
        break;
      }
    }
    if (!escaped) {
      *why = "obstacle " + std::to_string(i) + " not cleared with padding";
      return false;
    }
  }
  return true;
}

}  // namespace

ValidationReport validate_plan(const Plan& plan, const Environment& env, const BeliefModel& bm,
                               const ValidationOptions& opt) {
  const auto& recs = plan.records;
  if (recs.empty()) return fail(-1, "structure", "plan has no records");
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  const Eigen::Vector2d lo = bm.model.input_lower(), hi = bm.model.input_upper();

  for (std::size_t i = 0; i < recs.size(); ++i) {
    const PlanRecord& r = recs[i];
    const int k = static_cast<int>(i);
    if (r.k != k) return fail(k, "structure", "time index " + std::to_string(r.k) + " out of sequence");
    const bool last = i + 1 == recs.size();
    if (last && r.input) return fail(k, "structure", "terminal record carries an input");
    if (!last && !r.input) return fail(k, "structure", "missing input");
    if (!r.mean.allFinite() || !r.cov.allFinite()) return fail(k, "structure", "non-finite values");
    if ((r.cov - r.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + r.cov.norm())) {
      return fail(k, "covariance", "covariance is not symmetric");
    }
    if (Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(r.cov).eigenvalues().minCoeff() < -1e-10) {
      return fail(k, "covariance", "covariance is not positive semidefinite");
    }
  }
  if (recs.front().cov.cwiseAbs().maxCoeff() != 0.0) {
    return fail(0, "covariance", "initial covariance must be zero");
  }

  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    const int k = static_cast<int>(i);
    const Eigen::Vector2d u = *recs[i].input;
    if ((u.array() < lo.array() - 1e-12).any() || (u.array() > hi.array() + 1e-12).any()) {
      return fail(k, "input", "input outside bounds");
    }
    const double defect = (recs[i + 1].mean - step(recs[i].mean, u, zero, bm.model)).norm();
    if (defect > opt.defect_tol) {
      std::ostringstream msg;
      msg << "dynamics defect " << defect << " exceeds " << opt.defect_tol;
      return fail(k + 1, "defect", msg.str());
    }
    const Belief next = propagate({recs[i].mean, recs[i].cov}, u, bm.ut, bm.model, bm.w_cov);
    const double err = (next.cov - recs[i + 1].cov).norm();
    if (err > opt.cov_abs_tol + opt.cov_rel_tol * next.cov.norm()) {
      std::ostringstream msg;
      msg << "covariance differs from its propagation by " << err;
      return fail(k + 1, "covariance", msg.str());
    }
  }

  for (std::size_t i = 0; i < recs.size(); ++i) {
    std::string why;
    const bool safe = opt.use_dr ? tightened_safe(recs[i].mean, recs[i].cov, env, &why)
                                 : static_cast<bool>(deterministic_point_check(recs[i].mean, env));
    if (!safe) {
      return fail(static_cast<int>(i), "collision", why.empty() ? "state in collision" : why);
    }
  }
  return {};
}

}  // namespace riskplan
