#include "riskplan/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "riskplan/environment_io.hpp"

namespace riskplan {
namespace {

using nlohmann::json;

// Flattens nested objects into dotted keys, rejecting duplicates.
void flatten(const json& j, const std::string& prefix, std::map<std::string, json>* out) {
  if (!j.is_object()) throw LoadError(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      flatten(*it, key, out);
    } else if (!out->emplace(key, *it).second) {
      throw LoadError(key, "key given twice");
    }
  }
}

double num(const json& j, const std::string& key) {
  if (!j.is_number()) throw LoadError(key, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw LoadError(key, "expected a finite number");
  return v;
}

long long integer(const json& j, const std::string& key) {
  const double v = num(j, key);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw LoadError(key, "expected an integer");
  return static_cast<long long>(v);
}

std::uint64_t seed_value(const json& j, const std::string& key) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const long long v = integer(j, key);
  if (v < 0) throw LoadError(key, "seed must be non-negative");
  return static_cast<std::uint64_t>(v);
}

// Square matrix given as a full nested array or as its diagonal.
Eigen::MatrixXd matrix(const json& j, int n, const std::string& key) {
  if (!j.is_array()) throw LoadError(key, "expected a matrix or a diagonal");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  if (j.size() == static_cast<std::size_t>(n) && !j[0].is_array()) {
    for (int i = 0; i < n; ++i) m(i, i) = num(j[i], key + "[" + std::to_string(i) + "]");
    return m;
  }
  if (j.size() != static_cast<std::size_t>(n)) throw LoadError(key, "wrong matrix size");
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != static_cast<std::size_t>(n)) {
      throw LoadError(key + "[" + std::to_string(i) + "]", "wrong row size");
    }
    for (int c = 0; c < n; ++c) m(i, c) = num(j[i][c], key + "[" + std::to_string(i) + "]");
  }
  return m;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  ut.validate();
  if (!(noise.var >= 0.0)) throw std::invalid_argument("noise.var must be non-negative");
  if (nmpc.horizon < 1) throw std::invalid_argument("nmpc.horizon must be positive");
  if (nmpc.max_iter < 1) throw std::invalid_argument("nmpc.max_iter must be positive");
  if (!(nlp.tol_endpoint > 0.0) || !(nlp.tol_defect > 0.0)) {
    throw std::invalid_argument("nlp tolerances must be positive");
  }
  if (nlp.max_outer < 1 || nlp.max_inner < 1) {
    throw std::invalid_argument("nlp iteration caps must be positive");
  }
  track.validate();
  lqrm.validate();
  planner.validate();
  if (risk_beta && !(*risk_beta > 0.0 && *risk_beta <= 0.5)) {
    throw std::invalid_argument("risk.beta must lie in (0, 0.5]");
  }
  if (risk_t_max && *risk_t_max < 1) throw std::invalid_argument("risk.t_max must be positive");
}

BeliefModel RunConfig::belief_model() const {
  BeliefModel bm;
  bm.model = model;
  bm.ut = ut;
  bm.w_cov = noise.var * Eigen::Matrix3d::Identity();
  bm.nlp = nlp;
  return bm;
}

void RunConfig::apply_risk(Environment& env) const {
  if (risk_beta) env.risk.beta = *risk_beta;
  if (risk_t_max) env.risk.t_max = *risk_t_max;
  env.risk.validate();
}

SolverOptions RunConfig::nmpc_solver() const {
  SolverOptions o = nlp;
  o.max_total_iterations = nmpc.max_iter;
  o.max_inner = nmpc.max_iter;
  o.max_outer = nmpc.max_iter;
  return o;
}

RunConfig config_from_json(const json& doc) {
  std::map<std::string, json> flat;
  flatten(doc, "", &flat);

  RunConfig c;
  for (const auto& [key, v] : flat) {
    if (key == "dt") c.model.dt = num(v, key);
    else if (key == "v_max") c.model.v_max = num(v, key);
    else if (key == "omega_max") c.model.omega_max = num(v, key);
    else if (key == "noise.kind") {
      if (!v.is_string()) throw LoadError(key, "expected a string");
      try {
        c.noise.kind = noise_kind_from_string(v.get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw LoadError(key, e.what());
      }
    }
    else if (key == "noise.var") c.noise.var = num(v, key);
    else if (key == "noise.seed") c.noise.seed = seed_value(v, key);
    else if (key == "ut.alpha") c.ut.alpha = num(v, key);
    else if (key == "ut.beta") c.ut.beta = num(v, key);
    else if (key == "ut.kappa") c.ut.kappa = num(v, key);
    else if (key == "nlp.tol_endpoint") c.nlp.tol_endpoint = num(v, key);
    else if (key == "nlp.tol_defect") c.nlp.tol_defect = num(v, key);
    else if (key == "nlp.max_outer") c.nlp.max_outer = static_cast<int>(integer(v, key));
    else if (key == "nlp.max_inner") c.nlp.max_inner = static_cast<int>(integer(v, key));
    else if (key == "nmpc.horizon") c.nmpc.horizon = static_cast<int>(integer(v, key));
    else if (key == "nmpc.max_iter") c.nmpc.max_iter = static_cast<int>(integer(v, key));
    else if (key == "track.Q") c.track.Q = matrix(v, 3, key);
    else if (key == "track.R") c.track.R = matrix(v, 2, key);
    else if (key == "track.Qdelta") c.track.Q_delta = matrix(v, 3, key);
    else if (key == "track.Rdelta") c.track.R_delta = matrix(v, 2, key);
    else if (key == "track.QT_scale") c.track.QT_scale = num(v, key);
    else if (key == "lqrm.dtheta_max") c.lqrm.delta_theta_max = num(v, key);
    else if (key == "planner.samples") c.planner.num_samples = static_cast<int>(integer(v, key));
    else if (key == "planner.steer_horizon") c.planner.steer_horizon = static_cast<int>(integer(v, key));
    else if (key == "planner.max_step") c.planner.max_step = num(v, key);
    else if (key == "planner.gamma") c.planner.gamma = num(v, key);
    else if (key == "planner.w_pos") c.planner.w_pos = num(v, key);
    else if (key == "planner.w_ang") c.planner.w_ang = num(v, key);
    else if (key == "planner.seed") c.planner.seed = seed_value(v, key);
    else if (key == "planner.R") c.planner.R = matrix(v, 2, key);
    else if (key == "risk.beta") c.risk_beta = num(v, key);
    else if (key == "risk.t_max") c.risk_t_max = static_cast<int>(integer(v, key));
    else throw LoadError(key, "unknown configuration key");
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw LoadError("<config>", e.what());
  }
  return c;
}

RunConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw LoadError(file, "cannot open config file");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw LoadError(file, std::string("JSON parse error: ") + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const RunConfig& c) {
  json j = {
      {"dt", c.model.dt},
      {"v_max", c.model.v_max},
      {"omega_max", c.model.omega_max},
      {"noise", {{"kind", to_string(c.noise.kind)}, {"var", c.noise.var}, {"seed", c.noise.seed}}},
      {"ut", {{"alpha", c.ut.alpha}, {"beta", c.ut.beta}, {"kappa", c.ut.kappa}}},
      {"nlp",
       {{"tol_endpoint", c.nlp.tol_endpoint},
        {"tol_defect", c.nlp.tol_defect},
        {"max_outer", c.nlp.max_outer},
        {"max_inner", c.nlp.max_inner}}},
      {"nmpc", {{"horizon", c.nmpc.horizon}, {"max_iter", c.nmpc.max_iter}}},
      {"track",
       {{"Q", matrix_json(c.track.Q)},
        {"R", matrix_json(c.track.R)},
        {"Qdelta", matrix_json(c.track.Q_delta)},
        {"Rdelta", matrix_json(c.track.R_delta)},
        {"QT_scale", c.track.QT_scale}}},
      {"lqrm", {{"dtheta_max", c.lqrm.delta_theta_max}}},
      {"planner",
       {{"samples", c.planner.num_samples},
        {"steer_horizon", c.planner.steer_horizon},
        {"max_step", c.planner.max_step},
        {"gamma", c.planner.gamma},
        {"w_pos", c.planner.w_pos},
        {"w_ang", c.planner.w_ang},
        {"seed", c.planner.seed},
        {"R", matrix_json(c.planner.R)}}}};
  if (c.risk_beta) j["risk"]["beta"] = *c.risk_beta;
  if (c.risk_t_max) j["risk"]["t_max"] = *c.risk_t_max;
  return j;
}

}  // namespace riskplan
