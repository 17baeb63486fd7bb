#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "riskplan/geometry.hpp"

namespace riskplan {

/// A malformed input file. `path()` names the offending JSON location, e.g.
/// `obstacles[2][1].a`.
class LoadError : public std::runtime_error {
 public:
  LoadError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

Environment environment_from_json(const nlohmann::json& doc);
Environment load_environment(const std::string& file);
nlohmann::json environment_to_json(const Environment& env);

/// Checks the environment invariants and throws LoadError on the first one
/// that fails.
void validate_environment(const Environment& env);

}  // namespace riskplan
