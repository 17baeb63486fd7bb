#include "riskplan/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace riskplan {
namespace {

class NmpcTracker {
 public:
  NmpcTracker(const PreparedPlan& p, const ControllerSettings& s, const Polytope& bounds)
      : plan_(p), s_(s), bounds_(bounds) {}

  Eigen::Vector2d input(int k, const Eigen::Vector3d& x, int* fallbacks) {
    const Reference& ref = plan_.ref;
    const int T = ref.length();
    const int N = s_.nmpc_horizon;
    TrackingProblem prob;
    prob.x_now = x;
    for (int j = 0; j <= N; ++j) prob.ref_states.push_back(ref.states[std::min(k + j, T)]);
    for (int j = 0; j < N; ++j) {
      prob.ref_inputs.push_back(k + j < T ? ref.inputs[k + j] : Eigen::Vector2d::Zero());
    }
    prob.Q = s_.track.Q_delta + s_.track.Q;
    prob.Q_T = s_.track.QT_scale * prob.Q;
    prob.R = s_.track.R + s_.track.R_delta;
    prob.env_bounds = bounds_;
    prob.model = s_.model;

    std::optional<TrackingSolution> guess;
    if (previous_) {
      guess = shift_solution(*previous_, s_.model);
      guess->states.front() = x;
    }
    auto res = solve_tracking(prob, guess ? &*guess : nullptr, s_.nmpc_solver);
    if (res) {
      previous_ = std::move(res.value());
      return previous_->first_input();
    }
    ++*fallbacks;
    if (guess) {
      previous_ = std::move(*guess);
      return s_.model.clip(previous_->first_input());
    }
    return s_.model.clip(ref.inputs[std::min(k, T - 1)]);
  }

 private:
  const PreparedPlan& plan_;
  const ControllerSettings& s_;
  const Polytope& bounds_;
  std::optional<TrackingSolution> previous_;
};

}  // namespace

const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kOpenLoop: return "open_loop";
    case ControllerKind::kLqr: return "lqr";
    case ControllerKind::kLqrm: return "lqrm";
    case ControllerKind::kNmpc: return "nmpc";
  }
  return "unknown";
}

ControllerKind controller_from_string(const std::string& name) {
  if (name == "open_loop" || name == "openloop") return ControllerKind::kOpenLoop;
  if (name == "lqr") return ControllerKind::kLqr;
  if (name == "lqrm") return ControllerKind::kLqrm;
  if (name == "nmpc") return ControllerKind::kNmpc;
  throw std::invalid_argument("unknown controller '" + name + "'");
}

PreparedPlan prepare_plan(const Plan& plan, const ControllerSettings& settings) {
  if (plan.records.size() < 2) throw std::invalid_argument("plan needs at least one step");
  PreparedPlan p;
  p.ref.states = plan.means();
  p.ref.inputs = plan.inputs();
  if (p.ref.inputs.size() + 1 != p.ref.states.size()) {
    throw std::invalid_argument("plan inputs do not match its states");
  }
  p.lqr = std::make_shared<GlqPolicy>(
      tracking_policy(p.ref, settings.track, std::nullopt, settings.model));
  p.lqrm = std::make_shared<GlqPolicy>(
      tracking_policy(p.ref, settings.track, settings.lqrm, settings.model));
  return p;
}

TrialResult run_trial(const PreparedPlan& prepared, ControllerKind controller,
                      const ControllerSettings& settings, const std::vector<Eigen::Vector3d>& noise,
                      const Environment& env, TrialLog* log, bool timing) {
  const Reference& ref = prepared.ref;
  const int T = ref.length();
  if (static_cast<int>(noise.size()) < T) throw std::invalid_argument("noise sequence too short");

  const Eigen::Matrix3d Q = settings.track.Q_delta + settings.track.Q;
  const Eigen::Matrix3d Q_T = settings.track.QT_scale * Q;
  const Eigen::Matrix2d& R = settings.track.R;

  TrialResult res;
  res.controller = controller;
  NmpcTracker nmpc(prepared, settings, env.bounds);
  Eigen::Vector3d x = ref.states[0];
  if (log) {
    log->states = {x};
    log->inputs.clear();
  }
  if (!deterministic_point_check(x, env)) {
    res.collided = true;
    res.collision_step = 0;
    return res;
  }

  double compute = 0.0;
  for (int k = 0; k < T; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Eigen::Vector2d u;
    switch (controller) {
      case ControllerKind::kOpenLoop:
        u = ref.inputs[k];
        break;
      case ControllerKind::kLqr:
        u = apply_policy(*prepared.lqr, k, x, ref.states[k], ref.inputs[k], settings.model);
        break;
      case ControllerKind::kLqrm:
        u = apply_policy(*prepared.lqrm, k, x, ref.states[k], ref.inputs[k], settings.model);
        break;
      case ControllerKind::kNmpc:
        u = nmpc.input(k, x, &res.solver_fallbacks);
        break;
    }
    compute += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const Eigen::Vector3d dx = x - ref.states[k];
    res.dx_cost += dx.dot(Q * dx);
    res.u_cost += u.dot(R * u);
    x = step(x, u, noise[k], settings.model);
    if (log) {
      log->inputs.push_back(u);
      log->states.push_back(x);
    }
    if (!deterministic_point_check(x, env)) {
      res.collided = true;
      res.collision_step = k + 1;
      break;
    }
  }
  if (!res.collided) {
    const Eigen::Vector3d dx = x - ref.states[T];
    res.dx_cost += dx.dot(Q_T * dx);
    res.reached_goal = env.goal.contains(x);
  }
  res.runtime_s = timing ? compute : 0.0;
  return res;
}

void SweepSpec::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (noise_vars.empty()) throw std::invalid_argument("at least one noise level required");
  if (controllers.empty()) throw std::invalid_argument("at least one controller required");
  for (double v : noise_vars) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("noise levels must be >= 0");
  }
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
}

std::vector<TrialResult> run_sweep(const Plan& plan, const SweepSpec& spec, const Environment& env,
                                   const ControllerSettings& settings) {
  spec.validate();
  const PreparedPlan prepared = prepare_plan(plan, settings);
  const int T = prepared.ref.length();
  const int levels = static_cast<int>(spec.noise_vars.size());
  const int total = static_cast<int>(spec.controllers.size()) * levels * spec.trials;

  std::vector<TrialResult> rows(total);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (int i = next++; i < total; i = next++) {
      const int trial = i % spec.trials;
      const int level = (i / spec.trials) % levels;
      const int ctrl = i / (spec.trials * levels);
      try {
        const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(trial);
        const double var = spec.noise_vars[level];
        const auto noise = sample_noise(NoiseModel::isotropic(spec.noise_kind, var, seed), T);
        TrialResult r = run_trial(prepared, spec.controllers[ctrl], settings, noise, env, nullptr,
                                  spec.timing);
        r.trial = trial;
        r.noise_var = var;
        r.seed = seed;
        rows[i] = r;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int jobs = std::min(spec.jobs, std::max(total, 1));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<TrialResult>& rows) {
  out << "trial,controller,noise_var,collided,collision_step,dx_cost,u_cost,runtime_s,reached_goal,seed\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%d,%s,%.17g,%.17g,%.17g,%d,%llu\n", r.trial,
                  to_string(r.controller), r.noise_var, r.collided ? 1 : 0,
                  r.collision_step ? std::to_string(*r.collision_step).c_str() : "",
                  r.dx_cost, r.u_cost, r.runtime_s, r.reached_goal ? 1 : 0,
                  static_cast<unsigned long long>(r.seed));
    out << buf;
  }
}

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& rows) {
  std::vector<SummaryRow> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SummaryRow& s) {
      return s.controller == r.controller && s.noise_var == r.noise_var;
    });
    if (it == out.end()) {
      out.push_back({r.controller, r.noise_var});
      it = out.end() - 1;
    }
    ++it->trials;
    if (r.collided) {
      ++it->failures;
      continue;
    }
    it->reached += r.reached_goal ? 1 : 0;
    it->mean_dx_cost += r.dx_cost;
    it->mean_u_cost += r.u_cost;
    it->mean_runtime_s += r.runtime_s;
  }
  for (auto& s : out) {
    const int ok = s.trials - s.failures;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.mean_dx_cost = ok > 0 ? s.mean_dx_cost / ok : nan;
    s.mean_u_cost = ok > 0 ? s.mean_u_cost / ok : nan;
    s.mean_runtime_s = ok > 0 ? s.mean_runtime_s / ok : nan;
  }
  return out;
}

void print_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %-10s %7s %9s %8s %12s %12s %12s\n", "controller",
                "noise_var", "trials", "failures", "reached", "dx_cost", "u_cost", "runtime_s");
  out << buf;
  for (const auto& s : rows) {
    std::snprintf(buf, sizeof buf, "%-10s %-10.3g %7d %9d %8d %12.6g %12.6g %12.6g\n",
                  to_string(s.controller), s.noise_var, s.trials, s.failures, s.reached,
                  s.mean_dx_cost, s.mean_u_cost, s.mean_runtime_s);
    out << buf;
  }
}

}  // namespace riskplan
