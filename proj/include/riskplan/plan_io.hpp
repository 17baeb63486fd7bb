#pragma once

#include <string>

#include "json.hpp"
#include "riskplan/planner.hpp"

namespace riskplan {

nlohmann::json plan_to_json(const Plan& plan);
/// Throws LoadError naming the offending record on malformed input.
Plan plan_from_json(const nlohmann::json& doc);

/// One record per line so plans diff cleanly.
std::string plan_to_string(const Plan& plan);
void save_plan(const Plan& plan, const std::string& file);
Plan load_plan(const std::string& file);

void save_json(const nlohmann::json& doc, const std::string& file);

}  // namespace riskplan
