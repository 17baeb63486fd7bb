#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "riskplan/commands.hpp"

int main(int argc, char** argv) {
  using namespace riskplan;
  CLI::App app{"Risk-aware RRT* planning and tracking"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "grow a tree and extract the cheapest plan");
  p->add_option("--env", plan.env, "environment JSON")->required();
  p->add_option("--config", plan.config, "run configuration JSON");
  p->add_option("--seed", plan.seed, "planner seed");
  p->add_option("--samples", plan.samples, "number of samples");
  p->add_option("--out", plan.out, "output plan JSON")->required();
  p->add_flag("--no-dr", plan.no_dr, "deterministic collision checks only");
  p->add_option("--dump-tree", plan.dump_tree, "write the tree as JSON");

  ShortenArgs shorten;
  auto* s = app.add_subcommand("shorten", "re-steer plan segments with fewer steps");
  s->add_option("--plan", shorten.plan)->required();
  s->add_option("--env", shorten.env)->required();
  s->add_option("--config", shorten.config);
  s->add_option("--out", shorten.out)->required();
  s->add_flag("--no-dr", shorten.no_dr, "deterministic collision checks only");

  SweepArgs sweep;
  std::string controllers;
  auto* w = app.add_subcommand("sweep", "Monte Carlo trials over controllers and noise levels");
  w->add_option("--plan", sweep.plan)->required();
  w->add_option("--env", sweep.env)->required();
  w->add_option("--config", sweep.config);
  w->add_option("--controllers", controllers, "comma separated: openloop,lqr,lqrm,nmpc");
  w->add_option("--noise", sweep.noise, "noise variances")->delimiter(',');
  w->add_option("--trials", sweep.trials);
  w->add_option("--seed", sweep.seed);
  w->add_option("--out", sweep.out)->required();
  w->add_option("--jobs", sweep.jobs, "worker threads (default: all cores)");
  w->add_flag("--timing", sweep.timing, "record controller wall time");

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "re-check a plan file");
  v->add_option("--plan", validate.plan)->required();
  v->add_option("--env", validate.env)->required();
  v->add_option("--config", validate.config);
  v->add_flag("--no-dr", validate.no_dr, "deterministic collision checks only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*p) return cmd_plan(plan, std::cout, std::cerr);
  if (*s) return cmd_shorten(shorten, std::cout, std::cerr);
  if (*w) {
    if (!controllers.empty()) {
      sweep.controllers.clear();
      std::string item;
      for (char c : controllers + ",") {
        if (c == ',') {
          if (!item.empty()) sweep.controllers.push_back(item);
          item.clear();
        } else {
          item += c;
        }
      }
    }
    return cmd_sweep(sweep, std::cout, std::cerr);
  }
  return cmd_validate(validate, std::cout, std::cerr);
}
