#include "riskplan/commands.hpp"

#include <fstream>
#include <thread>

#include "json.hpp"
#include "riskplan/config.hpp"
#include "riskplan/environment_io.hpp"
#include "riskplan/plan_io.hpp"
#include "riskplan/planner.hpp"
#include "riskplan/simharness.hpp"
#include "riskplan/validation.hpp"

namespace riskplan {
namespace {

void report(std::ostream& err, const char* kind, const std::string& message,
            const std::string& path = "") {
  nlohmann::json j = {{"error", kind}, {"message", message}};
  if (!path.empty()) j["path"] = path;
  err << j.dump() << "\n";
}

struct Inputs {
  RunConfig config;
  Environment env;
};

// Loads config and environment; returns false after reporting on failure.
bool load_inputs(const std::string& config_file, const std::string& env_file, Inputs* in,
                 std::ostream& err) {
  try {
    if (!config_file.empty()) in->config = load_config(config_file);
    in->env = load_environment(env_file);
    in->config.apply_risk(in->env);
    return true;
  } catch (const LoadError& e) {
    report(err, "config", e.what(), e.path());
  } catch (const std::exception& e) {
    report(err, "config", e.what());
  }
  return false;
}

ControllerSettings controller_settings(const RunConfig& c) {
  ControllerSettings s;
  s.model = c.model;
  s.track = c.track;
  s.lqrm = c.lqrm;
  s.nmpc_horizon = c.nmpc.horizon;
  s.nmpc_solver = c.nmpc_solver();
  return s;
}

}  // namespace

std::vector<double> default_noise_grid() {
  return {5e-7, 1e-5, 1e-4, 1e-3, 2e-3, 3e-3, 3.5e-3, 5e-3};
}

int cmd_plan(const PlanArgs& args, std::ostream& out, std::ostream& err) {
  Inputs in;
  if (!load_inputs(args.config, args.env, &in, err)) return kExitConfig;
  PlannerConfig pc = in.config.planner;
  if (args.seed) pc.seed = *args.seed;
  if (args.samples) pc.num_samples = *args.samples;
  pc.use_dr = !args.no_dr;
  try {
    pc.validate();
  } catch (const std::exception& e) {
    report(err, "config", e.what());
    return kExitConfig;
  }

  const Tree tree = grow_tree(in.env, pc, in.config.belief_model());
  out << "samples " << tree.stats.samples << ", accepted " << tree.stats.accepted
      << ", rewires " << tree.stats.rewires << "\n";
  try {
    if (!args.dump_tree.empty()) save_json(tree_to_json(tree), args.dump_tree);
    const auto plan = extract_plan(tree, in.env);
    if (!plan) {
      report(err, "goal_unreached", "no tree node reached the goal region");
      return kExitUnreachable;
    }
    save_plan(*plan, args.out);
    out << "plan steps " << plan->steps() << "\n";
  } catch (const std::exception& e) {
    report(err, "io", e.what());
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_shorten(const ShortenArgs& args, std::ostream& out, std::ostream& err) {
  Inputs in;
  if (!load_inputs(args.config, args.env, &in, err)) return kExitConfig;
  Plan plan;
  try {
    plan = load_plan(args.plan);
  } catch (const LoadError& e) {
    report(err, "invalid_plan", e.what(), e.path());
    return kExitConfig;
  }
  PlannerConfig pc = in.config.planner;
  pc.use_dr = !args.no_dr;
  const BeliefModel bm = in.config.belief_model();
  ValidationOptions vo;
  vo.use_dr = pc.use_dr;
  const ValidationReport rep = validate_plan(plan, in.env, bm, vo);
  if (!rep.ok) {
    report(err, "invalid_plan",
           "record " + std::to_string(rep.record) + " (" + rep.check + "): " + rep.message);
    return kExitConfig;
  }
  const Plan shorter = shorten_plan(plan, in.env, pc, bm);
  try {
    save_plan(shorter, args.out);
  } catch (const std::exception& e) {
    report(err, "io", e.what());
    return kExitConfig;
  }
  out << "steps " << plan.steps() << " -> " << shorter.steps() << "\n";
  return kExitOk;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  Inputs in;
  if (!load_inputs(args.config, args.env, &in, err)) return kExitConfig;
  SweepSpec spec;
  try {
    for (const auto& c : args.controllers) spec.controllers.push_back(controller_from_string(c));
    spec.noise_vars = args.noise.empty() ? default_noise_grid() : args.noise;
    spec.trials = args.trials;
    spec.base_seed = args.seed;
    spec.noise_kind = in.config.noise.kind;
    spec.jobs = args.jobs > 0 ? args.jobs
                              : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    spec.timing = args.timing;
    spec.validate();
  } catch (const std::exception& e) {
    report(err, "config", e.what());
    return kExitConfig;
  }
  Plan plan;
  try {
    plan = load_plan(args.plan);
  } catch (const LoadError& e) {
    report(err, "invalid_plan", e.what(), e.path());
    return kExitConfig;
  }
  std::vector<TrialResult> rows;
  try {
    rows = run_sweep(plan, spec, in.env, controller_settings(in.config));
  } catch (const std::exception& e) {
    report(err, "invalid_plan", e.what());
    return kExitConfig;
  }
  std::ofstream csv(args.out, std::ios::binary);
  if (!csv) {
    report(err, "io", "cannot write " + args.out);
    return kExitConfig;
  }
  write_results_csv(csv, rows);
  print_summary(out, summarize(rows));
  return kExitOk;
}

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
  Inputs in;
  if (!load_inputs(args.config, args.env, &in, err)) return kExitConfig;
  Plan plan;
  try {
    plan = load_plan(args.plan);
  } catch (const LoadError& e) {
    report(err, "invalid_plan", e.what(), e.path());
    return kExitInvalid;
  }
  ValidationOptions vo;
  vo.use_dr = !args.no_dr;
  const ValidationReport rep = validate_plan(plan, in.env, in.config.belief_model(), vo);
  if (!rep.ok) {
    out << "FAIL record " << rep.record << " [" << rep.check << "] " << rep.message << "\n";
    report(err, "validation", rep.message + " at record " + std::to_string(rep.record));
    return kExitInvalid;
  }
  out << "OK " << plan.records.size() << " records\n";
  return kExitOk;
}

}  // namespace riskplan
