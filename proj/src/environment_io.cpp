#include "riskplan/environment_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace riskplan {
namespace {

using nlohmann::json;

std::string at(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}
std::string at(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw LoadError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw LoadError(path, "expected a finite number");
  return v;
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw LoadError(path.empty() ? "<root>" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw LoadError(at(path, key), "missing field");
  return *it;
}

std::vector<double> numbers(const json& j, std::size_t count, const std::string& path) {
  if (!j.is_array() || j.size() != count) {
    throw LoadError(path, "expected an array of " + std::to_string(count) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(number(j[i], at(path, i)));
  return out;
}

Eigen::Vector4d rect(const json& j, const std::string& path) {
  const auto r = numbers(j, 4, path);
  if (!(r[0] < r[1]) || !(r[2] < r[3])) {
    throw LoadError(path, "rect must be [xmin, xmax, ymin, ymax] with min < max");
  }
  return {r[0], r[1], r[2], r[3]};
}

Halfspace halfspace(const json& j, const std::string& path) {
  const auto a = numbers(field(j, "a", path), 3, at(path, "a"));
  Halfspace h{{a[0], a[1], a[2]}, number(field(j, "b", path), at(path, "b"))};
  if (h.a.norm() == 0.0) throw LoadError(at(path, "a"), "normal must be nonzero");
  return h;
}

Polytope polytope(const json& j, const std::string& path) {
  if (j.is_object() && j.contains("rect")) {
    const auto r = rect(j["rect"], at(path, "rect"));
    return Polytope::rectangle(r(0), r(1), r(2), r(3));
  }
  if (!j.is_array() || j.empty()) {
    throw LoadError(path, "expected a nonempty list of {a, b} faces or {rect: [...]}");
  }
  Polytope p;
  for (std::size_t i = 0; i < j.size(); ++i) p.faces.push_back(halfspace(j[i], at(path, i)));
  return p;
}

// Planar checks for polytopes whose faces do not involve the heading.
bool is_planar(const Polytope& p) {
  return std::all_of(p.faces.begin(), p.faces.end(),
                     [](const Halfspace& h) { return h.a(2) == 0.0; });
}

bool planar_bounded(const Polytope& p) {
  std::vector<double> angles;
  for (const auto& h : p.faces) angles.push_back(std::atan2(h.a(1), h.a(0)));
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return gap < std::numbers::pi - 1e-12;
}

bool planar_has_area(const Polytope& p) {
  std::vector<Eigen::Vector2d> vertices;
  const auto& f = p.faces;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      Eigen::Matrix2d m;
      m << f[i].a(0), f[i].a(1), f[j].a(0), f[j].a(1);
      if (std::abs(m.determinant()) < 1e-12) continue;
      const Eigen::Vector2d v = m.inverse() * Eigen::Vector2d(f[i].b, f[j].b);
      const bool inside = std::all_of(f.begin(), f.end(), [&](const Halfspace& h) {
        return h.eval({v(0), v(1), 0.0}) <= 1e-9 * (1.0 + std::abs(h.b));
      });
      if (inside) vertices.push_back(v);
    }
  }
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      for (std::size_t k = j + 1; k < vertices.size(); ++k) {
        const Eigen::Vector2d e1 = vertices[j] - vertices[i];
        const Eigen::Vector2d e2 = vertices[k] - vertices[i];
        if (std::abs(e1(0) * e2(1) - e1(1) * e2(0)) > 1e-12) return true;
      }
    }
  }
  return false;
}

json halfspace_json(const Halfspace& h) {
  return {{"a", {h.a(0), h.a(1), h.a(2)}}, {"b", h.b}};
}

json polytope_json(const Polytope& p) {
  json faces = json::array();
  for (const auto& h : p.faces) faces.push_back(halfspace_json(h));
  return faces;
}

}  // namespace

Environment environment_from_json(const json& doc) {
  Environment env;
  env.bounds = polytope(field(doc, "bounds", ""), "bounds");

  const json& obstacles = field(doc, "obstacles", "");
  if (!obstacles.is_array()) throw LoadError("obstacles", "expected a list");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    env.obstacles.push_back(polytope(obstacles[i], at("obstacles", i)));
  }

  const auto g = rect(field(field(doc, "goal", ""), "rect", "goal"), "goal.rect");
  env.goal = {g(0), g(1), g(2), g(3)};

  const auto s = numbers(field(doc, "start", ""), 3, "start");
  env.start = {s[0], s[1], s[2]};

  const json& risk = field(doc, "risk", "");
  env.risk.beta = number(field(risk, "beta", "risk"), "risk.beta");
  const double t_max = number(field(risk, "t_max", "risk"), "risk.t_max");
  if (t_max != std::floor(t_max) || t_max < 1 || t_max > 1e9) {
    throw LoadError("risk.t_max", "expected a positive integer");
  }
  env.risk.t_max = static_cast<int>(t_max);
  env.risk.n_total = env.constraint_count();

  validate_environment(env);
  return env;
}

void validate_environment(const Environment& env) {
  if (env.bounds.faces.empty()) throw LoadError("bounds", "at least one face required");
  if (env.constraint_count() <= 0) throw LoadError("<root>", "no constraints");
  if (is_planar(env.bounds) && !planar_has_area(env.bounds)) {
    throw LoadError("bounds", "polytope is empty");
  }
  for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
    const auto& ob = env.obstacles[i];
    const std::string path = at("obstacles", i);
    if (ob.faces.empty()) throw LoadError(path, "obstacle has no faces");
    if (!is_planar(ob)) continue;
    if (!planar_bounded(ob)) throw LoadError(path, "obstacle is unbounded");
    if (!planar_has_area(ob)) throw LoadError(path, "obstacle is empty");
  }
  const auto& g = env.goal;
  for (const Eigen::Vector3d& corner : {Eigen::Vector3d(g.xmin, g.ymin, 0.0),
                                       Eigen::Vector3d(g.xmin, g.ymax, 0.0),
                                       Eigen::Vector3d(g.xmax, g.ymin, 0.0),
                                       Eigen::Vector3d(g.xmax, g.ymax, 0.0)}) {
    if (!env.bounds.contains(corner)) throw LoadError("goal.rect", "goal is not inside bounds");
  }
  const Eigen::Vector3d start = env.start.vec();
  if (!start.allFinite()) throw LoadError("start", "non-finite start state");
  const auto verdict = deterministic_point_check(start, env);
  if (!verdict.safe) {
    throw LoadError(verdict.obstacle < 0 ? "start" : at("obstacles", verdict.obstacle),
                    verdict.obstacle < 0 ? "start is outside bounds" : "start lies inside obstacle");
  }
  try {
    env.risk.validate();
  } catch (const std::invalid_argument& e) {
    throw LoadError("risk", e.what());
  }
  if (env.risk.n_total != env.constraint_count()) {
    throw LoadError("risk", "constraint count does not match the environment");
  }
}

Environment load_environment(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw LoadError(file, "cannot open environment file");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw LoadError(file, std::string("JSON parse error: ") + e.what());
  }
  return environment_from_json(doc);
}

json environment_to_json(const Environment& env) {
  json obstacles = json::array();
  for (const auto& ob : env.obstacles) obstacles.push_back(polytope_json(ob));
  return {{"bounds", polytope_json(env.bounds)},
          {"obstacles", obstacles},
          {"goal", {{"rect", {env.goal.xmin, env.goal.xmax, env.goal.ymin, env.goal.ymax}}}},
          {"start", {env.start.px, env.start.py, env.start.theta}},
          {"risk", {{"beta", env.risk.beta}, {"t_max", env.risk.t_max}}}};
}

}  // namespace riskplan
