#pragma once

#include <string>

#include "riskplan/geometry.hpp"
#include "riskplan/planner.hpp"

namespace riskplan {

struct ValidationOptions {
  double defect_tol = 1e-6;
  /// Allowed mismatch between a stored covariance and its re-propagation,
  /// relative to the propagated norm.
  double cov_rel_tol = 1e-9;
  double cov_abs_tol = 1e-15;
  bool use_dr = true;
};

struct ValidationReport {
  bool ok = true;
  int record = -1;
  std::string check;
  std::string message;
};

/// Re-checks record indexing, input bounds, dynamics defects, covariance
/// chaining and collision constraints, stopping at the first violation.
ValidationReport validate_plan(const Plan& plan, const Environment& env, const BeliefModel& bm,
                               const ValidationOptions& opt = {});

}  // namespace riskplan
