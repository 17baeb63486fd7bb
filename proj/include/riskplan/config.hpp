#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "riskplan/dynamics.hpp"
#include "riskplan/geometry.hpp"
#include "riskplan/glq.hpp"
#include "riskplan/planner.hpp"
#include "riskplan/trajopt.hpp"
#include "riskplan/unscented.hpp"

namespace riskplan {

struct NoiseSettings {
  NoiseKind kind = NoiseKind::kLaplace;
  double var = 5e-7;
  std::uint64_t seed = 0;
};

struct NmpcSettings {
  int horizon = 10;
  int max_iter = 30;
};

/// All tunables of a run. Defaults follow the reference experiments.
struct RunConfig {
  ModelParams model;
  NoiseSettings noise;
  UtParams ut;
  SolverOptions nlp;
  NmpcSettings nmpc;
  TrackingPenalties track;
  RobustnessSpec lqrm;
  PlannerConfig planner;
  std::optional<double> risk_beta;
  std::optional<int> risk_t_max;

  void validate() const;
  /// Planning-time belief model: UT settings, steering solver and w_cov = var I.
  BeliefModel belief_model() const;
  /// Applies risk.* overrides to the environment budget.
  void apply_risk(Environment& env) const;
  SolverOptions nmpc_solver() const;
};

/// Accepts nested objects ({"noise": {"var": 1e-5}}) or dotted keys
/// ({"noise.var": 1e-5}). Unknown keys raise LoadError with their path.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::string& file);
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace riskplan
