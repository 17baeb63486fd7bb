#include "riskplan/plan_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "riskplan/environment_io.hpp"

namespace riskplan {
namespace {

using nlohmann::json;

std::vector<double> numbers(const json& j, std::size_t count, const std::string& path) {
  if (!j.is_array() || j.size() != count) {
    throw LoadError(path, "expected an array of " + std::to_string(count) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!j[i].is_number()) throw LoadError(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(j[i].get<double>());
    if (!std::isfinite(out.back())) throw LoadError(path, "non-finite value");
  }
  return out;
}

}  // namespace

json plan_to_json(const Plan& plan) {
  json out = json::array();
  for (const auto& r : plan.records) {
    json cov = json::array();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) cov.push_back(r.cov(i, j));
    }
    out.push_back({{"k", r.k},
                   {"mean", {r.mean(0), r.mean(1), r.mean(2)}},
                   {"cov", cov},
                   {"input", r.input ? json{(*r.input)(0), (*r.input)(1)} : json(nullptr)},
                   {"waypoint", r.waypoint}});
  }
  return out;
}

Plan plan_from_json(const json& doc) {
  if (!doc.is_array() || doc.empty()) throw LoadError("<root>", "expected a nonempty list of records");
  Plan plan;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "[" + std::to_string(i) + "]";
    const json& j = doc[i];
    if (!j.is_object()) throw LoadError(path, "expected an object");
    for (const char* key : {"k", "mean", "cov", "input"}) {
      if (!j.contains(key)) throw LoadError(path + "." + key, "missing field");
    }
    PlanRecord r;
    if (!j["k"].is_number_integer()) throw LoadError(path + ".k", "expected an integer");
    r.k = j["k"].get<int>();
    const auto m = numbers(j["mean"], 3, path + ".mean");
    r.mean = {m[0], m[1], m[2]};
    const auto c = numbers(j["cov"], 9, path + ".cov");
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) r.cov(a, b) = c[3 * a + b];
    }
    if (!j["input"].is_null()) {
      const auto u = numbers(j["input"], 2, path + ".input");
      r.input = Eigen::Vector2d(u[0], u[1]);
    }
    if (j.contains("waypoint")) {
      if (!j["waypoint"].is_boolean()) throw LoadError(path + ".waypoint", "expected a boolean");
      r.waypoint = j["waypoint"].get<bool>();
    }
    plan.records.push_back(r);
  }
  return plan;
}

std::string plan_to_string(const Plan& plan) {
  const json doc = plan_to_json(plan);
  std::ostringstream out;
  out << "[\n";
  for (std::size_t i = 0; i < doc.size(); ++i) {
    out << "  " << doc[i].dump() << (i + 1 < doc.size() ? ",\n" : "\n");
  }
  out << "]\n";
  return out.str();
}

void save_plan(const Plan& plan, const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << plan_to_string(plan);
}

Plan load_plan(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw LoadError(file, "cannot open plan file");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw LoadError(file, std::string("JSON parse error: ") + e.what());
  }
  return plan_from_json(doc);
}

void save_json(const json& doc, const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << doc.dump() << "\n";
}

}  // namespace riskplan
