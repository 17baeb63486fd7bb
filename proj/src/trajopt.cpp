#include "riskplan/trajopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "riskplan/linalg.hpp"

namespace riskplan {
namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

constexpr double kPi = std::numbers::pi;

// Multiple-shooting problem over z = [u_0, x_1, u_1, x_2, ..., u_{N-1}, x_N].
// Block k holds (u_k, x_{k+1}); x_0 is fixed.
struct Spec {
  int N = 1;
  Eigen::Vector3d x0 = Eigen::Vector3d::Zero();
  ModelParams model;
  Eigen::Matrix2d input_root = Eigen::Matrix2d::Identity();

  const std::vector<Eigen::Vector3d>* ref = nullptr;  // state tracking term if set
  Eigen::Matrix3d state_root = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d terminal_root = Eigen::Matrix3d::Zero();

  bool has_terminal = false;
  Eigen::Vector3d target = Eigen::Vector3d::Zero();

  std::vector<Halfspace> faces;  // imposed on x_1..x_N

  // When the iteration budget runs out, a feasible point counts as solved.
  bool accept_feasible_on_budget = false;

  int eq_count() const { return 3 * N + (has_terminal ? 3 : 0); }
  int ineq_count() const { return N * static_cast<int>(faces.size()); }
};

struct Multipliers {
  Eigen::VectorXd eq;
  Eigen::VectorXd ineq;
  double mu = 1.0;
};

struct Linearization {
  double phi = 0.0;
  Eigen::VectorXd g;  // half gradient of phi
  std::vector<Mat5> D;
  std::vector<Mat5> U;  // coupling of block k with block k + 1
};

struct RawResult {
  Eigen::VectorXd z;
  SolveStats stats;
  bool solved = false;
  FailureKind kind = FailureKind::kMaxIter;
  std::string message;
};

class ShootingSolver {
 public:
  ShootingSolver(const Spec& spec, const SolverOptions& options)
      : s_(spec), opt_(options), lo_(spec.model.input_lower()), hi_(spec.model.input_upper()) {}

  RawResult solve(Eigen::VectorXd z) {
    RawResult out;
    project(z);
    Multipliers m;
    m.eq = Eigen::VectorXd::Zero(s_.eq_count());
    m.ineq = Eigen::VectorXd::Zero(s_.ineq_count());
    m.mu = opt_.initial_penalty;

    const double tol_feas = 0.1 * std::min(opt_.tol_defect, opt_.tol_endpoint);
    const double tol_opt = opt_.tol_optimality;
    double prev_viol = std::numeric_limits<double>::infinity();
    int total = 0;

    for (int outer = 1; outer <= opt_.max_outer; ++outer) {
      int budget = opt_.max_inner;
      if (opt_.max_total_iterations > 0) budget = std::min(budget, opt_.max_total_iterations - total);
      double pg = 0.0;
      const bool finite = inner(z, m, budget, 0.1 * tol_opt, &pg, &total);

      out.stats.outer_iterations = outer;
      out.stats.inner_iterations = total;
      out.stats.projected_gradient = pg;
      out.stats.eq_multipliers = m.eq;
      out.stats.ineq_multipliers = m.ineq;
      out.stats.penalty = m.mu;
      if (!finite) {
        out.z = z;
        out.kind = FailureKind::kNumerical;
        out.message = "non-finite iterate";
        return out;
      }

      Eigen::VectorXd c, h;
      constraints(z, &c, &h);
      const double viol = violation(c, h);
      out.stats.max_violation = viol;

      if (viol <= tol_feas && pg <= tol_opt) {
        out.z = z;
        out.solved = true;
        return out;
      }
      const bool exhausted =
          opt_.max_total_iterations > 0 && total >= opt_.max_total_iterations;
      if (exhausted) {
        out.z = z;
        if (s_.accept_feasible_on_budget && viol <= tol_feas) {
          out.solved = true;
        } else {
          out.kind = FailureKind::kMaxIter;
          out.message = "iteration budget exhausted";
        }
        return out;
      }

      m.eq += m.mu * c;
      m.ineq = (m.ineq + m.mu * h).cwiseMax(0.0);
      if (viol > 0.25 * prev_viol) {
        if (m.mu >= opt_.max_penalty && viol > 1e3 * tol_feas) {
          out.z = z;
          out.kind = FailureKind::kInfeasible;
          out.message = "constraint violation stalled at maximum penalty";
          return out;
        }
        m.mu = std::min(10.0 * m.mu, opt_.max_penalty);
      }
      prev_viol = viol;
    }
    out.z = z;
    out.kind = FailureKind::kMaxIter;
    out.message = "outer iteration cap reached";
    return out;
  }

  Eigen::Vector3d x(const Eigen::VectorXd& z, int k) const {
    return k == 0 ? s_.x0 : Eigen::Vector3d(z.segment<3>(5 * (k - 1) + 2));
  }
  Eigen::Vector2d u(const Eigen::VectorXd& z, int k) const {
    return z.segment<2>(5 * k);
  }

 private:
  void project(Eigen::VectorXd& z) const {
    for (int k = 0; k < s_.N; ++k) {
      z.segment<2>(5 * k) = z.segment<2>(5 * k).cwiseMax(lo_).cwiseMin(hi_);
    }
  }

  void constraints(const Eigen::VectorXd& z, Eigen::VectorXd* c, Eigen::VectorXd* h) const {
    const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
    c->resize(s_.eq_count());
    for (int k = 0; k < s_.N; ++k) {
      c->segment<3>(3 * k) = x(z, k + 1) - step(x(z, k), u(z, k), zero, s_.model);
    }
    if (s_.has_terminal) c->segment<3>(3 * s_.N) = x(z, s_.N) - s_.target;
    h->resize(s_.ineq_count());
    const int nf = static_cast<int>(s_.faces.size());
    for (int j = 1; j <= s_.N; ++j) {
      for (int f = 0; f < nf; ++f) (*h)((j - 1) * nf + f) = s_.faces[f].eval(x(z, j));
    }
  }

  static double violation(const Eigen::VectorXd& c, const Eigen::VectorXd& h) {
    double v = c.size() > 0 ? c.cwiseAbs().maxCoeff() : 0.0;
    if (h.size() > 0) v = std::max(v, h.maxCoeff());
    return v;
  }

  // Builds phi = |r|^2 where r stacks the weighted objective residuals and the
  // shifted-penalty constraint residuals. Derivatives are optional.
  void linearize(const Eigen::VectorXd& z, const Multipliers& m, bool derivs,
                 Linearization* lin) const {
    const int N = s_.N;
    lin->phi = 0.0;
    if (derivs) {
      lin->g.setZero(5 * N);
      lin->D.assign(N, Mat5::Zero());
      lin->U.assign(std::max(N - 1, 0), Mat5::Zero());
    }
    auto single = [&](int b, const auto& J, const auto& r) {
      lin->phi += r.squaredNorm();
      if (!derivs) return;
      lin->g.segment<5>(5 * b) += J.transpose() * r;
      lin->D[b] += J.transpose() * J;
    };
    auto pair = [&](int b, const auto& J0, const auto& J1, const auto& r) {
      lin->phi += r.squaredNorm();
      if (!derivs) return;
      lin->g.segment<5>(5 * b) += J0.transpose() * r;
      lin->g.segment<5>(5 * (b + 1)) += J1.transpose() * r;
      lin->D[b] += J0.transpose() * J0;
      lin->D[b + 1] += J1.transpose() * J1;
      lin->U[b] += J0.transpose() * J1;
    };

    const double sq = std::sqrt(0.5 * m.mu);
    const double dt = s_.model.dt;
    const Eigen::Vector3d zero = Eigen::Vector3d::Zero();

    for (int k = 0; k < N; ++k) {
      const Eigen::Vector2d uk = u(z, k);
      const Eigen::Vector3d xk = x(z, k);

      Eigen::Matrix<double, 2, 5> Ju = Eigen::Matrix<double, 2, 5>::Zero();
      Ju.leftCols<2>() = s_.input_root;
      single(k, Ju, Eigen::Vector2d(s_.input_root * uk));

      if (s_.ref != nullptr) {
        const Eigen::Matrix3d& L = k + 1 < N ? s_.state_root : s_.terminal_root;
        Eigen::Matrix<double, 3, 5> Jx = Eigen::Matrix<double, 3, 5>::Zero();
        Jx.rightCols<3>() = L;
        single(k, Jx, Eigen::Vector3d(L * (x(z, k + 1) - (*s_.ref)[k + 1])));
      }

      const Eigen::Vector3d c = x(z, k + 1) - step(xk, uk, zero, s_.model);
      const Eigen::Vector3d lam = m.eq.segment<3>(3 * k);
      const Eigen::Vector3d r = sq * (c + lam / m.mu);
      const Jacobians jac = jacobians(xk, uk, s_.model);
      Eigen::Matrix<double, 3, 5> Jc = Eigen::Matrix<double, 3, 5>::Zero();
      Jc.leftCols<2>() = -sq * jac.B;
      Jc.rightCols<3>() = sq * Eigen::Matrix3d::Identity();
      if (k == 0) {
        single(0, Jc, r);
      } else {
        Eigen::Matrix<double, 3, 5> Jp = Eigen::Matrix<double, 3, 5>::Zero();
        Jp.rightCols<3>() = -sq * jac.A;
        pair(k - 1, Jp, Jc, r);
        if (derivs) {
          // Curvature of the defect, weighted by the multiplier estimate.
          const Eigen::Vector3d y = lam + m.mu * c;
          const double ct = std::cos(xk(2)), st = std::sin(xk(2));
          const double htt = dt * uk(0) * (y(0) * ct + y(1) * st);
          const double htv = dt * (y(0) * st - y(1) * ct);
          lin->D[k - 1](4, 4) += 0.5 * htt;
          lin->U[k - 1](4, 0) += 0.5 * htv;
        }
      }
    }

    if (s_.has_terminal) {
      const Eigen::Vector3d c = x(z, N) - s_.target;
      const Eigen::Vector3d r = sq * (c + m.eq.segment<3>(3 * N) / m.mu);
      Eigen::Matrix<double, 3, 5> J = Eigen::Matrix<double, 3, 5>::Zero();
      J.rightCols<3>() = sq * Eigen::Matrix3d::Identity();
      single(N - 1, J, r);
    }

    const int nf = static_cast<int>(s_.faces.size());
    for (int j = 1; j <= N; ++j) {
      for (int f = 0; f < nf; ++f) {
        const Halfspace& face = s_.faces[f];
        const double v = face.eval(x(z, j)) + m.ineq((j - 1) * nf + f) / m.mu;
        if (v <= 0.0) continue;
        Eigen::Matrix<double, 1, 5> J = Eigen::Matrix<double, 1, 5>::Zero();
        J.rightCols<3>() = sq * face.a.transpose();
        single(j - 1, J, Eigen::Matrix<double, 1, 1>(sq * v));
      }
    }
  }

  double projected_gradient(const Eigen::VectorXd& z, const Eigen::VectorXd& g) const {
    double pg = 0.0;
    for (int k = 0; k < s_.N; ++k) {
      for (int i = 0; i < 2; ++i) {
        const double zi = z(5 * k + i);
        const double moved = std::clamp(zi - 2.0 * g(5 * k + i), lo_(i), hi_(i));
        pg = std::max(pg, std::abs(zi - moved));
      }
      pg = std::max(pg, 2.0 * g.segment<3>(5 * k + 2).cwiseAbs().maxCoeff());
    }
    return pg;
  }

  // Block-tridiagonal Cholesky solve of (D + rho I, U) delta = -g with the
  // fixed variables pinned to zero. Returns false if not positive definite.
  bool newton_step(const Linearization& lin, const std::vector<bool>& fixed, double rho,
                   Eigen::VectorXd* delta) const {
    const int N = s_.N;
    std::vector<Mat5> Lb(N), M(std::max(N - 1, 0));
    std::vector<Vec5> y(N);
    auto pinned = [&](int b, int i) { return i < 2 && fixed[2 * b + i]; };

    for (int k = 0; k < N; ++k) {
      Mat5 Dk = lin.D[k];
      Dk.diagonal().array() += rho;
      Vec5 rhs = -lin.g.segment<5>(5 * k);
      for (int i = 0; i < 2; ++i) {
        if (!pinned(k, i)) continue;
        Dk.row(i).setZero();
        Dk.col(i).setZero();
        Dk(i, i) = 1.0;
        rhs(i) = 0.0;
      }
      if (k > 0) {
        Dk -= M[k - 1] * M[k - 1].transpose();
        rhs -= M[k - 1] * y[k - 1];
      }
      Eigen::LLT<Mat5> llt(Dk);
      if (llt.info() != Eigen::Success) return false;
      Lb[k] = llt.matrixL();
      if (!Lb[k].allFinite() || Lb[k].diagonal().minCoeff() <= 0.0) return false;
      y[k] = Lb[k].triangularView<Eigen::Lower>().solve(rhs);
      if (k + 1 < N) {
        Mat5 Uk = lin.U[k];
        for (int i = 0; i < 2; ++i) {
          if (pinned(k, i)) Uk.row(i).setZero();
          if (pinned(k + 1, i)) Uk.col(i).setZero();
        }
        // M_k = U_k^T L_k^{-T}
        M[k] = Lb[k].triangularView<Eigen::Lower>().solve(Uk).transpose();
      }
    }
    delta->resize(5 * N);
    Vec5 next = Vec5::Zero();
    for (int k = N - 1; k >= 0; --k) {
      Vec5 rhs = y[k];
      if (k + 1 < N) rhs -= M[k].transpose() * next;
      next = Lb[k].transpose().triangularView<Eigen::Upper>().solve(rhs);
      delta->segment<5>(5 * k) = next;
    }
    return delta->allFinite();
  }

  // Damped projected Newton on the augmented objective. Returns false on a
  // non-finite iterate.
  bool inner(Eigen::VectorXd& z, const Multipliers& m, int budget, double tol, double* pg_out,
             int* total) {
    Linearization lin;
    linearize(z, m, true, &lin);
    if (!std::isfinite(lin.phi)) return false;
    double pg = projected_gradient(z, lin.g);
    double rho = 0.0;
    std::vector<bool> fixed(2 * s_.N);
    Eigen::VectorXd delta, trial;
    Linearization probe;

    for (int it = 0; it < budget && pg > tol; ++it) {
      ++*total;
      for (int k = 0; k < s_.N; ++k) {
        for (int i = 0; i < 2; ++i) {
          const double zi = z(5 * k + i), gi = lin.g(5 * k + i);
          const double eps = 1e-12 * (1.0 + std::abs(hi_(i)));
          fixed[2 * k + i] = (zi <= lo_(i) + eps && gi > 0.0) || (zi >= hi_(i) - eps && gi < 0.0);
        }
      }
      double max_diag = 1.0;
      for (const auto& d : lin.D) max_diag = std::max(max_diag, d.diagonal().cwiseAbs().maxCoeff());

      bool accepted = false;
      for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
        if (!newton_step(lin, fixed, rho, &delta)) {
          rho = std::max(10.0 * rho, 1e-10 * max_diag);
          continue;
        }
        double t = 1.0;
        for (int ls = 0; ls < 20; ++ls, t *= 0.5) {
          trial = z + t * delta;
          project(trial);
          const double slope = 2.0 * lin.g.dot(trial - z);
          if (slope >= 0.0) {
            if ((trial - z).lpNorm<Eigen::Infinity>() == 0.0) break;
            continue;
          }
          linearize(trial, m, false, &probe);
          if (std::isfinite(probe.phi) && probe.phi <= lin.phi + 1e-4 * slope) {
            accepted = true;
            break;
          }
        }
        if (accepted) {
          rho = t == 1.0 ? (rho < 1e-9 * max_diag ? 0.0 : 0.1 * rho) : rho;
        } else {
          rho = std::max(10.0 * rho, 1e-8 * max_diag);
        }
      }
      if (!accepted) break;
      const double prev_phi = lin.phi;
      z = trial;
      linearize(z, m, true, &lin);
      if (!std::isfinite(lin.phi) || !z.allFinite()) return false;
      pg = projected_gradient(z, lin.g);
      if (prev_phi - lin.phi <= 1e-16 * (1.0 + std::abs(prev_phi)) && pg <= 1e3 * tol) break;
    }
    *pg_out = pg;
    return std::isfinite(pg);
  }

  const Spec& s_;
  SolverOptions opt_;
  Eigen::Vector2d lo_, hi_;
};

Eigen::VectorXd pack(const std::vector<Eigen::Vector3d>& states,
                     const std::vector<Eigen::Vector2d>& inputs) {
  const int N = static_cast<int>(inputs.size());
  Eigen::VectorXd z(5 * N);
  for (int k = 0; k < N; ++k) {
    z.segment<2>(5 * k) = inputs[k];
    z.segment<3>(5 * k + 2) = states[k + 1];
  }
  return z;
}

void unpack(const Eigen::VectorXd& z, const Eigen::Vector3d& x0,
            std::vector<Eigen::Vector3d>* states, std::vector<Eigen::Vector2d>* inputs) {
  const int N = static_cast<int>(z.size() / 5);
  states->assign(1, x0);
  inputs->clear();
  for (int k = 0; k < N; ++k) {
    inputs->push_back(z.segment<2>(5 * k));
    states->push_back(z.segment<3>(5 * k + 2));
  }
}

double lerp(double a, double b, double t) { return a + (b - a) * t; }

void validate_options(const SolverOptions& o) {
  if (!(o.tol_endpoint > 0.0) || !(o.tol_defect > 0.0) || !(o.tol_optimality > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (o.max_outer < 1 || o.max_inner < 1 || o.max_total_iterations < 0) {
    throw std::invalid_argument("solver iteration caps must be positive");
  }
  if (!(o.initial_penalty > 0.0) || !(o.max_penalty >= o.initial_penalty)) {
    throw std::invalid_argument("invalid penalty settings");
  }
}

Eigen::Matrix2d checked_input_root(const Eigen::Matrix2d& R) {
  if (!R.allFinite() || (R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + R.norm())) {
    throw std::invalid_argument("R must be symmetric");
  }
  Eigen::LLT<Eigen::Matrix2d> llt(R);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("R must be positive definite");
  return weight_root(R);
}

}  // namespace

const char* to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::kInfeasible: return "infeasible";
    case FailureKind::kMaxIter: return "max_iter";
    case FailureKind::kNumerical: return "numerical";
  }
  return "unknown";
}

double max_defect(const std::vector<Eigen::Vector3d>& states,
                  const std::vector<Eigen::Vector2d>& inputs, const ModelParams& model) {
  double worst = 0.0;
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Eigen::Vector3d d = states[k + 1] - step(states[k], inputs[k], zero, model);
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
  }
  return worst;
}

SteeredTrajectory steering_initial_guess(const SteeringProblem& p) {
  const int N = p.horizon;
  const Eigen::Vector3d a = p.s_init.vec();
  const Eigen::Vector3d b = p.s_des.vec();
  const Eigen::Vector2d disp = (b - a).head<2>();

  std::vector<double> heading(N + 1);
  if (disp.norm() > 1e-9) {
    // Drive forward or in reverse, whichever needs less initial turning.
    double psi = std::atan2(disp(1), disp(0));
    psi += 2.0 * kPi * std::round((a(2) - psi) / (2.0 * kPi));
    double back = psi + kPi;
    back += 2.0 * kPi * std::round((a(2) - back) / (2.0 * kPi));
    if (std::abs(back - a(2)) < std::abs(psi - a(2))) psi = back;
    const int half = std::max(1, N / 2);
    for (int k = 0; k <= N; ++k) {
      heading[k] = k <= half ? lerp(a(2), psi, double(k) / half)
                             : lerp(psi, b(2), double(k - half) / std::max(1, N - half));
    }
    if (N == 1) heading[1] = b(2);
  } else {
    for (int k = 0; k <= N; ++k) heading[k] = lerp(a(2), b(2), double(k) / N);
  }

  SteeredTrajectory guess;
  for (int k = 0; k <= N; ++k) {
    const Eigen::Vector2d pos = a.head<2>() + disp * (double(k) / N);
    guess.states.emplace_back(pos(0), pos(1), heading[k]);
  }
  const double dt = p.model.dt;
  for (int k = 0; k < N; ++k) {
    const Eigen::Vector3d d = guess.states[k + 1] - guess.states[k];
    const double th = guess.states[k](2);
    const Eigen::Vector2d u(d(0) * std::cos(th) / dt + d(1) * std::sin(th) / dt, d(2) / dt);
    guess.inputs.push_back(p.model.clip(u));
  }
  return guess;
}

Outcome<SteeredTrajectory> solve_steering(const SteeringProblem& problem,
                                          const SolverOptions& options) {
  problem.model.validate();
  validate_options(options);
  if (problem.horizon < 1) throw std::invalid_argument("steering horizon must be at least 1");
  const Eigen::Vector3d a = problem.s_init.vec();
  const Eigen::Vector3d b = problem.s_des.vec();
  if (!a.allFinite() || !b.allFinite()) throw std::invalid_argument("non-finite steering endpoints");

  const ModelParams& m = problem.model;
  const double span = problem.horizon * m.dt;
  if ((b - a).head<2>().norm() > span * m.v_max * (1.0 + 1e-12)) {
    return Failure{FailureKind::kInfeasible, "target beyond reachable distance"};
  }
  if (std::abs(b(2) - a(2)) > span * m.omega_max * (1.0 + 1e-12)) {
    return Failure{FailureKind::kInfeasible, "target heading beyond reachable rotation"};
  }

  Spec spec;
  spec.N = problem.horizon;
  spec.x0 = a;
  spec.model = m;
  spec.input_root = checked_input_root(problem.R);
  spec.has_terminal = true;
  spec.target = b;

  const SteeredTrajectory guess = steering_initial_guess(problem);
  ShootingSolver solver(spec, options);
  RawResult raw = solver.solve(pack(guess.states, guess.inputs));
  if (!raw.solved) return Failure{raw.kind, raw.message};

  SteeredTrajectory out;
  unpack(raw.z, a, &out.states, &out.inputs);
  for (const auto& u : out.inputs) out.cost += u.dot(problem.R * u);
  out.stats = raw.stats;
  return out;
}

Outcome<TrackingSolution> solve_tracking(const TrackingProblem& problem,
                                         const TrackingSolution* warm_start,
                                         const SolverOptions& options) {
  problem.model.validate();
  validate_options(options);
  const int N = problem.horizon();
  if (N < 1) throw std::invalid_argument("tracking horizon must be at least 1");
  if (static_cast<int>(problem.ref_states.size()) != N + 1) {
    throw std::invalid_argument("tracking reference must hold horizon + 1 states");
  }

  Spec spec;
  spec.N = N;
  spec.x0 = problem.x_now;
  spec.model = problem.model;
  spec.input_root = checked_input_root(problem.R);
  spec.ref = &problem.ref_states;
  spec.state_root = weight_root(problem.Q);
  spec.terminal_root = weight_root(problem.Q_T);
  spec.faces = problem.env_bounds.faces;
  spec.accept_feasible_on_budget = true;

  Eigen::VectorXd z0;
  if (warm_start != nullptr) {
    if (static_cast<int>(warm_start->inputs.size()) != N ||
        static_cast<int>(warm_start->states.size()) != N + 1) {
      throw std::invalid_argument("warm start does not match the tracking horizon");
    }
    z0 = pack(warm_start->states, warm_start->inputs);
  } else {
    z0 = pack(problem.ref_states, problem.ref_inputs);
  }

  ShootingSolver solver(spec, options);
  RawResult raw = solver.solve(std::move(z0));
  if (!raw.solved) return Failure{raw.kind, raw.message};

  TrackingSolution out;
  unpack(raw.z, problem.x_now, &out.states, &out.inputs);
  for (int k = 0; k < N; ++k) {
    const Eigen::Vector3d d = out.states[k] - problem.ref_states[k];
    out.cost += d.dot(problem.Q * d) + out.inputs[k].dot(problem.R * out.inputs[k]);
  }
  const Eigen::Vector3d dT = out.states[N] - problem.ref_states[N];
  out.cost += dT.dot(problem.Q_T * dT);
  out.stats = raw.stats;
  return out;
}

TrackingSolution shift_solution(const TrackingSolution& previous, const ModelParams& model) {
  TrackingSolution out;
  if (previous.inputs.empty()) return previous;
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  out.inputs.assign(previous.inputs.begin() + 1, previous.inputs.end());
  out.inputs.push_back(previous.inputs.back());
  out.states.assign(previous.states.begin() + 1, previous.states.end());
  out.states.push_back(step(out.states.back(), out.inputs.back(), zero, model));
  return out;
}

}  // namespace riskplan
