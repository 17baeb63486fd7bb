#include "riskplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace riskplan {
namespace {

constexpr double kPi = std::numbers::pi;

struct Candidate {
  EdgeTrajectory edge;
  double cost = 0.0;
};

// Steers from `from` to `target` and propagates the chained beliefs. Empty
// if the NLP fails or any belief along the edge is unsafe.
std::optional<EdgeTrajectory> connect(const Belief& from, const Eigen::Vector3d& target,
                                      int horizon, const Environment& env,
                                      const PlannerConfig& cfg, const BeliefModel& bm,
                                      TreeStats* stats) {
  SteeringProblem sp{State::from(from.mean), State::from(target), horizon, cfg.R, bm.model};
  auto res = solve_steering(sp, bm.nlp);
  if (!res) {
    if (stats) ++stats->steer_failures;
    return std::nullopt;
  }
  SteeredTrajectory& traj = res.value();
  traj.states.back() = target;
  EdgeTrajectory edge;
  edge.beliefs = propagate_along(from.cov, traj.states, traj.inputs, bm);
  for (std::size_t k = 1; k < edge.beliefs.size(); ++k) {
    if (!belief_check(edge.beliefs[k], env, cfg.use_dr)) {
      if (stats) ++stats->unsafe_edges;
      return std::nullopt;
    }
  }
  edge.inputs = std::move(traj.inputs);
  edge.steer_cost = traj.cost;
  return edge;
}

bool is_ancestor(const Tree& tree, int maybe_ancestor, int node) {
  for (int cur = node; cur >= 0; cur = tree.nodes[cur].parent) {
    if (cur == maybe_ancestor) return true;
  }
  return false;
}

// Target heading re-expressed within pi of `from`.
Eigen::Vector3d unwrap_to(const Eigen::Vector3d& target, double from) {
  Eigen::Vector3d t = target;
  t(2) = from + wrap_angle(target(2) - from);
  return t;
}

}  // namespace

void PlannerConfig::validate() const {
  if (num_samples < 0) throw std::invalid_argument("planner.samples must be non-negative");
  if (steer_horizon < 1) throw std::invalid_argument("planner.steer_horizon must be positive");
  if (!(max_step > 0.0)) throw std::invalid_argument("planner.max_step must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("planner.gamma must be positive");
  if (!(w_pos > 0.0) || !(w_ang > 0.0)) {
    throw std::invalid_argument("planner metric weights must be positive");
  }
  Eigen::LLT<Eigen::Matrix2d> llt(R);
  if (!R.allFinite() || !R.isApprox(R.transpose()) || llt.info() != Eigen::Success) {
    throw std::invalid_argument("planner.R must be symmetric positive definite");
  }
}

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double tree_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const PlannerConfig& cfg) {
  const double dth = wrap_angle(b(2) - a(2));
  return std::sqrt(cfg.w_pos * (b - a).head<2>().squaredNorm() + cfg.w_ang * dth * dth);
}

SafetyVerdict belief_check(const Belief& b, const Environment& env, bool use_dr) {
  return use_dr ? dr_point_check(b.mean, b.cov, env, env.risk)
                : deterministic_point_check(b.mean, env);
}

std::vector<Belief> propagate_along(const Eigen::Matrix3d& start_cov,
                                    const std::vector<Eigen::Vector3d>& states,
                                    const std::vector<Eigen::Vector2d>& inputs,
                                    const BeliefModel& bm) {
  std::vector<Belief> out;
  out.reserve(states.size());
  out.push_back({states[0], start_cov});
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Belief next = propagate({states[k], out.back().cov}, inputs[k], bm.ut, bm.model, bm.w_cov);
    out.push_back({states[k + 1], next.cov});
  }
  return out;
}

std::vector<Eigen::Vector3d> draw_samples(const Environment& env, const PlannerConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const Eigen::Vector4d box = env.bounding_box();
  std::uniform_real_distribution<double> ux(box(0), box(1)), uy(box(2), box(3));
  std::uniform_real_distribution<double> uth(-kPi, kPi);
  std::vector<Eigen::Vector3d> out;
  out.reserve(cfg.num_samples);
  constexpr int kMaxAttempts = 10000;
  for (int i = 0; i < cfg.num_samples; ++i) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const double x = ux(rng), y = uy(rng);
      double th = uth(rng);
      if (th == -kPi) th = kPi;
      const Eigen::Vector3d s(x, y, th);
      if (deterministic_point_check(s, env)) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

Tree grow_tree(const Environment& env, const PlannerConfig& cfg, const BeliefModel& bm) {
  cfg.validate();
  bm.model.validate();
  bm.ut.validate();

  Tree tree;
  TreeNode root;
  root.belief = {env.start.vec(), Eigen::Matrix3d::Zero()};
  if (!belief_check(root.belief, env, cfg.use_dr)) {
    throw std::invalid_argument("start state fails the collision check");
  }
  tree.nodes.push_back(root);
  std::vector<std::vector<int>> children(1);

  for (const Eigen::Vector3d& sample : draw_samples(env, cfg)) {
    ++tree.stats.samples;
    const int n = static_cast<int>(tree.nodes.size());

    int nearest = 0;
    double best_d = tree_distance(tree.nodes[0].belief.mean, sample, cfg);
    for (int i = 1; i < n; ++i) {
      const double d = tree_distance(tree.nodes[i].belief.mean, sample, cfg);
      if (d < best_d) {
        best_d = d;
        nearest = i;
      }
    }

    // Limit the step in position; heading moves by the same fraction.
    const Eigen::Vector3d from = tree.nodes[nearest].belief.mean;
    const double dist = (sample - from).head<2>().norm();
    const double ratio = dist > cfg.max_step ? cfg.max_step / dist : 1.0;
    Eigen::Vector3d target;
    target.head<2>() = from.head<2>() + ratio * (sample - from).head<2>();
    target(2) = from(2) + ratio * wrap_angle(sample(2) - from(2));

    auto first = connect(tree.nodes[nearest].belief, target, cfg.steer_horizon, env, cfg, bm,
                         &tree.stats);
    if (!first) continue;

    int parent = nearest;
    Candidate best{std::move(*first), 0.0};
    best.cost = tree.nodes[nearest].cost + best.edge.steer_cost;

    const double radius =
        std::min(cfg.gamma * std::sqrt(std::log(double(n)) / n), cfg.max_step);
    std::vector<int> near;
    for (int i = 0; i < n; ++i) {
      if ((tree.nodes[i].belief.mean - target).head<2>().norm() <= radius) near.push_back(i);
    }

    for (int i : near) {
      if (i == nearest || tree.nodes[i].cost >= best.cost) continue;
      const Eigen::Vector3d t = unwrap_to(target, tree.nodes[i].belief.mean(2));
      auto edge = connect(tree.nodes[i].belief, t, cfg.steer_horizon, env, cfg, bm, nullptr);
      if (!edge) continue;
      const double c = tree.nodes[i].cost + edge->steer_cost;
      if (c < best.cost) {
        best = {std::move(*edge), c};
        parent = i;
      }
    }

    TreeNode node;
    node.id = n;
    node.parent = parent;
    node.belief = best.edge.beliefs.back();
    node.edge = std::move(best.edge);
    node.cost = best.cost;
    tree.nodes.push_back(std::move(node));
    children.emplace_back();
    children[parent].push_back(n);
    ++tree.stats.accepted;

    // Rewire neighbors through the new node.
    for (int x : near) {
      const TreeNode& fresh = tree.nodes[n];
      if (x == fresh.parent || is_ancestor(tree, x, n)) continue;
      if (fresh.cost >= tree.nodes[x].cost) continue;
      const Eigen::Vector3d old_mean = tree.nodes[x].belief.mean;
      const Eigen::Vector3d t = unwrap_to(old_mean, fresh.belief.mean(2));
      const double shift = t(2) - old_mean(2);
      auto edge = connect(fresh.belief, t, cfg.steer_horizon, env, cfg, bm, nullptr);
      if (!edge) continue;
      const double new_cost = fresh.cost + edge->steer_cost;
      if (!(new_cost < tree.nodes[x].cost)) continue;

      // Re-propagate the subtree from the new covariance; abort on any
      // unsafe belief.
      std::vector<int> order{x};
      for (std::size_t i = 0; i < order.size(); ++i) {
        for (int ch : children[order[i]]) order.push_back(ch);
      }
      std::vector<EdgeTrajectory> updated(order.size());
      updated[0] = std::move(*edge);
      std::vector<int> slot(tree.nodes.size(), -1);
      slot[x] = 0;
      bool safe = true;
      for (std::size_t i = 1; i < order.size() && safe; ++i) {
        const TreeNode& d = tree.nodes[order[i]];
        slot[d.id] = static_cast<int>(i);
        const Eigen::Matrix3d& start_cov = updated[slot[d.parent]].beliefs.back().cov;
        std::vector<Eigen::Vector3d> means;
        for (const auto& b : d.edge.beliefs) means.push_back(b.mean + Eigen::Vector3d(0, 0, shift));
        updated[i].beliefs = propagate_along(start_cov, means, d.edge.inputs, bm);
        updated[i].inputs = d.edge.inputs;
        updated[i].steer_cost = d.edge.steer_cost;
        for (std::size_t k = 1; k < updated[i].beliefs.size() && safe; ++k) {
          safe = static_cast<bool>(belief_check(updated[i].beliefs[k], env, cfg.use_dr));
        }
      }
      if (!safe) continue;

      const double delta = tree.nodes[x].cost - new_cost;
      auto& siblings = children[tree.nodes[x].parent];
      siblings.erase(std::find(siblings.begin(), siblings.end(), x));
      children[n].push_back(x);
      tree.nodes[x].parent = n;
      for (std::size_t i = 0; i < order.size(); ++i) {
        TreeNode& d = tree.nodes[order[i]];
        d.edge = std::move(updated[i]);
        d.belief = d.edge.beliefs.back();
        d.cost -= delta;
      }
      ++tree.stats.rewires;
    }
  }
  return tree;
}

std::vector<Eigen::Vector3d> Plan::means() const {
  std::vector<Eigen::Vector3d> out;
  for (const auto& r : records) out.push_back(r.mean);
  return out;
}

std::vector<Eigen::Vector2d> Plan::inputs() const {
  std::vector<Eigen::Vector2d> out;
  for (const auto& r : records) {
    if (r.input) out.push_back(*r.input);
  }
  return out;
}

std::optional<Plan> extract_plan(const Tree& tree, const Environment& env) {
  int best = -1;
  for (const auto& node : tree.nodes) {
    if (!env.goal.contains(node.belief.mean)) continue;
    if (best < 0 || node.cost < tree.nodes[best].cost) best = node.id;
  }
  if (best < 0) return std::nullopt;

  std::vector<int> chain;
  for (int cur = best; cur >= 0; cur = tree.nodes[cur].parent) chain.push_back(cur);
  std::reverse(chain.begin(), chain.end());

  Plan plan;
  const TreeNode& root = tree.nodes[chain.front()];
  plan.records.push_back({0, root.belief.mean, root.belief.cov, std::nullopt, true});
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const EdgeTrajectory& e = tree.nodes[chain[i]].edge;
    for (std::size_t k = 0; k < e.inputs.size(); ++k) {
      plan.records.back().input = e.inputs[k];
      PlanRecord rec;
      rec.k = static_cast<int>(plan.records.size());
      rec.mean = e.beliefs[k + 1].mean;
      rec.cov = e.beliefs[k + 1].cov;
      rec.waypoint = k + 1 == e.inputs.size();
      plan.records.push_back(rec);
    }
  }
  return plan;
}

Plan shorten_plan(const Plan& plan, const Environment& env, const PlannerConfig& cfg,
                  const BeliefModel& bm) {
  if (plan.records.empty()) throw std::invalid_argument("cannot shorten an empty plan");
  std::vector<int> cuts{0};
  for (int i = 1; i < static_cast<int>(plan.records.size()); ++i) {
    if (plan.records[i].waypoint || i + 1 == static_cast<int>(plan.records.size())) cuts.push_back(i);
  }

  Plan out;
  PlanRecord first = plan.records.front();
  first.k = 0;
  first.waypoint = true;
  first.input.reset();
  out.records.push_back(first);

  const double reach = bm.model.v_max * bm.model.dt;
  for (std::size_t s = 1; s < cuts.size(); ++s) {
    const int a = cuts[s - 1], b = cuts[s];
    const int length = b - a;
    const Eigen::Vector3d start = plan.records[a].mean;
    const Eigen::Vector3d goal = plan.records[b].mean;
    const Belief from{out.records.back().mean, out.records.back().cov};

    std::optional<EdgeTrajectory> chosen;
    const double gap = (goal - start).head<2>().norm();
    const int n0 = std::max(1, static_cast<int>(std::ceil(gap / reach - 1e-9)));
    for (int n = n0; n < length && !chosen; ++n) {
      chosen = connect(from, goal, n, env, cfg, bm, nullptr);
    }
    if (!chosen) {
      // Keep the original segment, re-propagated from the chained prefix.
      std::vector<Eigen::Vector3d> means;
      std::vector<Eigen::Vector2d> inputs;
      for (int i = a; i <= b; ++i) means.push_back(plan.records[i].mean);
      for (int i = a; i < b; ++i) {
        if (!plan.records[i].input) return plan;
        inputs.push_back(*plan.records[i].input);
      }
      EdgeTrajectory e;
      e.beliefs = propagate_along(from.cov, means, inputs, bm);
      for (std::size_t k = 1; k < e.beliefs.size(); ++k) {
        if (!belief_check(e.beliefs[k], env, cfg.use_dr)) return plan;
      }
      e.inputs = std::move(inputs);
      chosen = std::move(e);
    }
    for (std::size_t k = 0; k < chosen->inputs.size(); ++k) {
      out.records.back().input = chosen->inputs[k];
      PlanRecord rec;
      rec.k = static_cast<int>(out.records.size());
      rec.mean = chosen->beliefs[k + 1].mean;
      rec.cov = chosen->beliefs[k + 1].cov;
      rec.waypoint = k + 1 == chosen->inputs.size();
      out.records.push_back(rec);
    }
  }
  return out;
}

nlohmann::json tree_to_json(const Tree& tree) {
  using nlohmann::json;
  json nodes = json::array(), edges = json::array();
  for (const auto& n : tree.nodes) {
    const auto& m = n.belief.mean;
    nodes.push_back({{"id", n.id},
                     {"parent", n.parent < 0 ? json(nullptr) : json(n.parent)},
                     {"mean", {m(0), m(1), m(2)}},
                     {"cost", n.cost}});
    if (n.parent < 0) continue;
    json points = json::array();
    for (const auto& b : n.edge.beliefs) points.push_back({b.mean(0), b.mean(1)});
    edges.push_back({{"parent", n.parent}, {"child", n.id}, {"points", points}});
  }
  return {{"nodes", nodes},
          {"edges", edges},
          {"stats",
           {{"samples", tree.stats.samples},
            {"accepted", tree.stats.accepted},
            {"steer_failures", tree.stats.steer_failures},
            {"unsafe_edges", tree.stats.unsafe_edges},
            {"rewires", tree.stats.rewires}}}};
}

}  // namespace riskplan
