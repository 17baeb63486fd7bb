#include "riskplan/glq.hpp"

#include <cmath>
#include <sstream>

namespace riskplan {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kConditionWarning = 1e12;

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Inverse of a symmetric definite block. sign = +1 requires positive
// definiteness, -1 negative definiteness.
MatrixXd definite_inverse(const MatrixXd& block, int sign, int step, const char* name,
                          std::vector<std::string>* warnings) {
  const MatrixXd s = sign * sym(block);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s);
  if (eig.info() != Eigen::Success || !s.allFinite()) {
    throw GlqError(step, std::string(name) + " is not finite");
  }
  const VectorXd values = eig.eigenvalues();
  const double lo = values.minCoeff(), hi = values.maxCoeff();
  if (!(lo > 0.0)) {
    throw GlqError(step, std::string(name) + (sign > 0 ? " is not positive definite"
                                                       : " is not negative definite"));
  }
  if (hi / lo > kConditionWarning) {
    std::ostringstream msg;
    msg << "step " << step << ": " << name << " condition number " << hi / lo;
    warnings->push_back(msg.str());
  }
  return sign * (eig.eigenvectors() * values.cwiseInverse().asDiagonal() *
                 eig.eigenvectors().transpose());
}

void check_stage(const GlqStage& s, int n, int k) {
  const int m = s.m(), c = s.c(), p = s.p();
  auto fail = [&](const std::string& what) { throw GlqError(k, what); };
  if (s.A.rows() != n || s.A.cols() != n) fail("A has the wrong shape");
  if (s.B.rows() != n) fail("B has the wrong shape");
  if (c > 0 && s.C.rows() != n) fail("C has the wrong shape");
  if (s.E.size() > 0 && s.E.rows() != n) fail("E has the wrong shape");
  const int dim = n + m + c + p;
  if (s.G.rows() != dim || s.G.cols() != dim) fail("G has the wrong shape");
  if (s.W.size() > 0 && (s.W.rows() != s.E.cols() || s.W.cols() != s.E.cols())) {
    fail("W does not match E");
  }
  for (const auto* list : {&s.A_noise, &s.B_noise, &s.C_noise}) {
    for (const auto& d : *list) {
      if (!(d.variance >= 0.0)) fail("noise variance must be non-negative");
    }
  }
}

}  // namespace

double GlqPolicy::cost_to_go(int k, const Eigen::VectorXd& x) const {
  return x.dot(P[k] * x) + 2.0 * q[k].dot(x) + r[k];
}

GlqPolicy solve_glq(const std::vector<GlqStage>& stages, const GlqTerminal& terminal) {
  const int T = static_cast<int>(stages.size());
  const int n = static_cast<int>(terminal.G.rows() - terminal.z.size());
  if (n <= 0 || terminal.G.cols() != terminal.G.rows()) {
    throw GlqError(T, "terminal cost has the wrong shape");
  }

  GlqPolicy pol;
  pol.K_u.resize(T);
  pol.L_u.resize(T);
  pol.e_u.resize(T);
  pol.K_v.resize(T);
  pol.L_v.resize(T);
  pol.e_v.resize(T);
  pol.P.resize(T + 1);
  pol.q.resize(T + 1);
  pol.r.resize(T + 1);

  const int pT = static_cast<int>(terminal.z.size());
  const MatrixXd GT = sym(terminal.G);
  pol.P[T] = GT.topLeftCorner(n, n);
  pol.q[T] = GT.topRightCorner(n, pT) * terminal.z;
  pol.r[T] = terminal.z.dot(GT.bottomRightCorner(pT, pT) * terminal.z);

  for (int k = T - 1; k >= 0; --k) {
    const GlqStage& s = stages[k];
    check_stage(s, n, k);
    const int m = s.m(), c = s.c(), p = s.p();
    const int dim = n + m + c + p;
    const MatrixXd& P = pol.P[k + 1];
    const VectorXd& q = pol.q[k + 1];

    MatrixXd F = MatrixXd::Zero(n, dim);  // [A B C 0]
    F.leftCols(n) = s.A;
    F.middleCols(n, m) = s.B;
    if (c > 0) F.middleCols(n + m, c) = s.C;

    MatrixXd H = sym(s.G) + F.transpose() * P * F;
    for (const auto& d : s.A_noise) H.block(0, 0, n, n) += d.variance * d.M.transpose() * P * d.M;
    for (const auto& d : s.B_noise) H.block(n, n, m, m) += d.variance * d.M.transpose() * P * d.M;
    for (const auto& d : s.C_noise) {
      H.block(n + m, n + m, c, c) += d.variance * d.M.transpose() * P * d.M;
    }
    H = sym(H);

    const MatrixXd Hux = H.block(n, 0, m, n), Huu = H.block(n, n, m, m),
                   Huz = H.block(n, n + m + c, m, p);
    const VectorXd Btq = s.B.transpose() * q;

    MatrixXd S = Huu, Sx = Hux, Sz = Huz;
    VectorXd Sq = Btq;
    MatrixXd Hvv_inv, Hvu, Hvx, Hvz;
    VectorXd Ctq;
    if (c > 0) {
      Hvu = H.block(n + m, n, c, m);
      Hvx = H.block(n + m, 0, c, n);
      Hvz = H.block(n + m, n + m + c, c, p);
      Ctq = s.C.transpose() * q;
      Hvv_inv = definite_inverse(H.block(n + m, n + m, c, c), -1, k, "H_vv", &pol.warnings);
      const MatrixXd Huv_Hvv_inv = Hvu.transpose() * Hvv_inv;
      S -= Huv_Hvv_inv * Hvu;
      Sx -= Huv_Hvv_inv * Hvx;
      Sz -= Huv_Hvv_inv * Hvz;
      Sq -= Huv_Hvv_inv * Ctq;  // (B - C H_vv^-1 H_vu)^T q
    }
    const MatrixXd S_inv = definite_inverse(S, +1, k, "H_uu", &pol.warnings);
    pol.K_u[k] = -S_inv * Sx;
    pol.L_u[k] = -S_inv * Sz;
    pol.e_u[k] = -S_inv * Sq;
    if (c > 0) {
      pol.K_v[k] = -Hvv_inv * (Hvx + Hvu * pol.K_u[k]);
      pol.L_v[k] = -Hvv_inv * (Hvz + Hvu * pol.L_u[k]);
      pol.e_v[k] = -Hvv_inv * (Ctq + Hvu * pol.e_u[k]);
    } else {
      pol.K_v[k] = MatrixXd::Zero(0, n);
      pol.L_v[k] = MatrixXd::Zero(0, p);
      pol.e_v[k] = VectorXd::Zero(0);
    }

    // Closed-loop substitution [x; u; v; z] = M x + mm.
    MatrixXd M = MatrixXd::Zero(dim, n);
    M.topRows(n).setIdentity();
    M.middleRows(n, m) = pol.K_u[k];
    if (c > 0) M.middleRows(n + m, c) = pol.K_v[k];
    VectorXd mm = VectorXd::Zero(dim);
    mm.segment(n, m) = pol.L_u[k] * s.z + pol.e_u[k];
    if (c > 0) mm.segment(n + m, c) = pol.L_v[k] * s.z + pol.e_v[k];
    mm.tail(p) = s.z;

    double noise_term = 0.0;
    if (s.W.size() > 0 && s.E.size() > 0) {
      noise_term = (s.E.transpose() * P * s.E * s.W).trace();
    }
    pol.P[k] = sym(M.transpose() * H * M);
    pol.q[k] = M.transpose() * H * mm + (F * M).transpose() * q;
    pol.r[k] = mm.dot(H * mm) + 2.0 * q.dot(F * mm) + pol.r[k + 1] + noise_term;
  }
  return pol;
}

void TrackingPenalties::validate() const {
  auto psd = [](const Eigen::MatrixXd& m, const char* name, bool strict) {
    if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.norm())) {
      throw std::invalid_argument(std::string(name) + " must be symmetric");
    }
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
    if (strict ? !(lo > 0.0) : lo < -1e-12) {
      throw std::invalid_argument(std::string(name) + (strict ? " must be positive definite"
                                                              : " must be positive semidefinite"));
    }
  };
  psd(Q, "track.Q", false);
  psd(Q_delta, "track.Qdelta", false);
  psd(R_delta, "track.Rdelta", false);
  psd(R + R_delta, "track.R + track.Rdelta", true);
  psd(R, "track.R", false);
  if (!(QT_scale > 0.0)) throw std::invalid_argument("track.QT_scale must be positive");
  if (S_delta) psd(*S_delta, "S_delta", true);
}

void RobustnessSpec::validate() const {
  if (!(delta_theta_max > 0.0 && delta_theta_max <= 3.14159265358979323846 / 2.0)) {
    throw std::invalid_argument("lqrm.dtheta_max must lie in (0, pi/2]");
  }
}

std::vector<GlqStage> build_tracking_stages(const Reference& ref, const TrackingPenalties& pen,
                                            const std::optional<RobustnessSpec>& spec,
                                            const ModelParams& model) {
  pen.validate();
  if (spec) spec->validate();
  const int T = ref.length();
  if (static_cast<int>(ref.states.size()) != T + 1) {
    throw std::invalid_argument("reference needs one more state than inputs");
  }
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  for (int k = 0; k < T; ++k) {
    const double d = (ref.states[k + 1] - step(ref.states[k], ref.inputs[k], zero, model))
                         .cwiseAbs()
                         .maxCoeff();
    if (!(d <= 1e-6)) {
      throw std::invalid_argument("reference is not dynamically consistent at step " +
                                  std::to_string(k));
    }
  }

  const int c = pen.S_delta ? 3 : 0;
  const int dim = 3 + 2 + c + 5;
  std::vector<GlqStage> stages(T);
  for (int k = 0; k < T; ++k) {
    GlqStage& s = stages[k];
    const Jacobians j = jacobians(ref.states[k], ref.inputs[k], model);
    s.A = j.A;
    s.B = j.B;
    s.E = j.E;
    s.C = c > 0 ? Eigen::MatrixXd(Eigen::Matrix3d::Identity()) : Eigen::MatrixXd::Zero(3, 0);
    s.z.resize(5);
    s.z << ref.states[k], ref.inputs[k];

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
    const int iz = 5 + c;
    G.block<3, 3>(0, 0) = pen.Q_delta + pen.Q;
    G.block<2, 2>(3, 3) = pen.R_delta + pen.R;
    if (c > 0) G.block(5, 5, c, c) = -*pen.S_delta;
    G.block<3, 3>(0, iz) = pen.Q;
    G.block<3, 3>(iz, 0) = pen.Q;
    G.block<2, 2>(3, iz + 3) = pen.R;
    G.block<2, 2>(iz + 3, 3) = pen.R;
    G.block<3, 3>(iz, iz) = pen.Q;
    G.block<2, 2>(iz + 3, iz + 3) = pen.R;
    s.G = G;

    if (spec) {
      const double th = ref.states[k](2), nu = ref.inputs[k](0), dt = model.dt;
      const double sn = std::sin(th), cs = std::cos(th);
      const double dmax = spec->delta_theta_max;
      Eigen::Matrix3d A1 = Eigen::Matrix3d::Zero(), A2 = Eigen::Matrix3d::Zero();
      A1(0, 2) = -sn;
      A1(1, 2) = cs;
      A2(0, 2) = -cs;
      A2(1, 2) = -sn;
      Eigen::Matrix<double, 3, 2> B1 = Eigen::Matrix<double, 3, 2>::Zero(), B2 = B1;
      B1(0, 0) = -sn * dt;
      B1(1, 0) = cs * dt;
      B2(0, 0) = cs * dt;
      B2(1, 0) = sn * dt;
      const double sa1 = nu * dt * std::sin(dmax), sa2 = nu * dt * (1.0 - std::cos(dmax));
      const double sb1 = std::sin(dmax), sb2 = 1.0 - std::cos(dmax);
      s.A_noise = {{A1, sa1 * sa1}, {A2, sa2 * sa2}};
      s.B_noise = {{B1, sb1 * sb1}, {B2, sb2 * sb2}};
    }
  }
  return stages;
}

GlqTerminal build_tracking_terminal(const Reference& ref, const TrackingPenalties& pen) {
  GlqTerminal t;
  const double a = pen.QT_scale;
  t.z = Eigen::VectorXd::Zero(5);
  t.z.head<3>() = ref.states.back();
  t.G = Eigen::MatrixXd::Zero(8, 8);
  t.G.block<3, 3>(0, 0) = a * (pen.Q_delta + pen.Q);
  t.G.block<3, 3>(0, 3) = a * pen.Q;
  t.G.block<3, 3>(3, 0) = a * pen.Q;
  t.G.block<3, 3>(3, 3) = a * pen.Q;
  return t;
}

GlqPolicy tracking_policy(const Reference& ref, const TrackingPenalties& pen,
                          const std::optional<RobustnessSpec>& spec, const ModelParams& model) {
  return solve_glq(build_tracking_stages(ref, pen, spec, model),
                   build_tracking_terminal(ref, pen));
}

Eigen::Vector2d policy_input_unclipped(const GlqPolicy& policy, int k, const Eigen::Vector3d& x,
                                       const Eigen::Vector3d& xbar, const Eigen::Vector2d& ubar) {
  if (k < 0 || k >= policy.horizon()) throw std::out_of_range("policy step out of range");
  Eigen::Matrix<double, 5, 1> z;
  z << xbar, ubar;
  return policy.K_u[k] * (x - xbar) + policy.L_u[k] * z + policy.e_u[k] + ubar;
}

Eigen::Vector2d apply_policy(const GlqPolicy& policy, int k, const Eigen::Vector3d& x,
                             const Eigen::Vector3d& xbar, const Eigen::Vector2d& ubar,
                             const ModelParams& model) {
  return model.clip(policy_input_unclipped(policy, k, x, xbar, ubar));
}

}  // namespace riskplan
