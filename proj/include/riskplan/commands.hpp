#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace riskplan {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitUnreachable = 3,
  kExitInvalid = 4,
};

struct PlanArgs {
  std::string env;
  std::string config;  // optional
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::string out;
  bool no_dr = false;
  std::string dump_tree;  // optional
};

struct ShortenArgs {
  std::string plan;
  std::string env;
  std::string config;
  std::string out;
  bool no_dr = false;
};

struct SweepArgs {
  std::string plan;
  std::string env;
  std::string config;
  std::vector<std::string> controllers{"open_loop", "lqr", "lqrm", "nmpc"};
  std::vector<double> noise;  // defaults to the standard grid when empty
  int trials = 100;
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 0;  // 0 means hardware concurrency
  bool timing = false;
};

struct ValidateArgs {
  std::string plan;
  std::string env;
  std::string config;
  bool no_dr = false;
};

/// Noise levels swept when none are given.
std::vector<double> default_noise_grid();

// Each command reports progress on `out` and a one-line JSON error on `err`,
// returning one of the exit codes above.
int cmd_plan(const PlanArgs& args, std::ostream& out, std::ostream& err);
int cmd_shorten(const ShortenArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);

}  // namespace riskplan
