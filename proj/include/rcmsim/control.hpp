#pragma once

#include <sstream>

#include "rcmsim/types.hpp"

namespace rcmsim {

/// Controller gains and solver parameters.
struct GainSet {
  Vec3 k_ins = Vec3(20.0, 20.0, 20.0);  // instrument position gain, 1/s
  double k_adm = 0.1;      // admittance gain, m/(N*s)
  double eta0 = 0.25;      // null-space setpoint for eta
  double lambda_dls = 1e-4;  // damped-least-squares factor; 0 = bare pinv
  double w_gain = 1.0;     // step size on the null-space gradient
  double qdot_limit = 2.0;  // per-joint rate limit, rad/s

  void validate() const {
    if ((k_ins.array() <= 0.0).any()) {
      throw ConfigError("gains.k_ins entries must be > 0");
    }
    if (!(k_adm >= 0.0)) throw ConfigError("gains.k_adm must be >= 0");
    if (!(eta0 > 0.0 && eta0 < 1.0)) {
      throw ConfigError("gains.eta0 must lie in (0,1)");
    }
    if (!(lambda_dls >= 0.0)) {
      throw ConfigError("gains.lambda_dls must be >= 0");
    }
    if (!(qdot_limit > 0.0)) {
      throw ConfigError("gains.qdot_limit must be > 0");
    }
  }
};

/// One tick's worth of controller output.
struct ControlCommand {
  JointVector q_dot = JointVector::Zero();
  double eta_dot = 0.0;
  Vec6 x_dot_cmd = Vec6::Zero();  // stacked instrument / RCM command velocity
  Vec6 e_tot = Vec6::Zero();      // stacked position error (m) / force error (N)
  bool rate_saturated = false;
};

/// Rank-1 projector onto the instrument shaft direction. (I - omega)
/// projects into the plane perpendicular to the shaft.
inline Mat3 projection_matrix(const Vec3& d_ins) {
  const double n = d_ins.norm();
  if (!(n > 1e-9)) {
    throw GeometryError("projection_matrix: instrument direction is "
                        "degenerate (|d_ins| <= 1e-9)");
  }
  const Vec3 nd = d_ins / n;
  return nd * nd.transpose();
}

/// Admittance law: command velocity proportional to the force error
/// component perpendicular to the shaft.
inline Vec3 admittance_velocity(const Vec3& f_rcm_hat, const Vec3& f_desired,
                                const Vec3& d_ins, double k_adm) {
  const Mat3 omega = projection_matrix(d_ins);
  return k_adm * ((Mat3::Identity() - omega) * (f_rcm_hat - f_desired));
}

/// Stacked command velocity G * e_tot with
/// G = blockdiag(K_ins, k_adm (I - omega)).
inline Vec6 build_command(const Vec3& e_pos, const Vec3& f_err,
                          const GainSet& gains, const Vec3& d_ins) {
  Vec6 cmd;
  cmd.head<3>() = gains.k_ins.asDiagonal() * e_pos;
  cmd.tail<3>() = admittance_velocity(f_err, Vec3::Zero(), d_ins, gains.k_adm);
  return cmd;
}

/// Gradient of the secondary cost 1/2 (eta - eta0)^2 over the extended
/// coordinates; only the eta entry is nonzero.
inline ExtendedVector null_space_gradient(double eta, double eta0) {
  ExtendedVector w = ExtendedVector::Zero();
  w[kNumJoints] = eta - eta0;
  return w;
}

struct RedundancySolution {
  JointVector q_dot;
  double eta_dot;
  ExtendedVector extended;  // (q_dot, eta_dot) before any rate scaling
};

/// Damped-pseudoinverse solve of the stacked constraint with the secondary
/// objective projected into the null space:
///   sol = J^+ x_dot_cmd + (I - J^+ J) (-w_gain * w)
/// With lambda = 0 the bare pseudoinverse is used and a near-singular
/// system raises SingularityError instead of amplifying noise.
inline RedundancySolution solve_redundancy(const Jacobian6x8& j_total,
                                           const Vec6& x_dot_cmd,
                                           const ExtendedVector& w,
                                           double lambda_dls,
                                           double w_gain) {
  if (!j_total.allFinite() || !x_dot_cmd.allFinite()) {
    throw std::invalid_argument("solve_redundancy: non-finite input");
  }
  const Eigen::MatrixXd j = j_total;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      j, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma[0];

  if (lambda_dls == 0.0) {
    const double sigma_min = sigma[sigma.size() - 1];
    if (sigma_max <= 0.0 || sigma_min <= 1e-10 * sigma_max) {
      std::ostringstream msg;
      msg << "solve_redundancy: J_total is near singular (sigma_min="
          << sigma_min << ", sigma_max=" << sigma_max
          << "); set gains.lambda_dls > 0";
      throw SingularityError(msg.str());
    }
  }

  // J^+ = V diag(s/(s^2+l^2)) U^T ; J^+ J = V diag(s^2/(s^2+l^2)) V^T.
  const double l2 = lambda_dls * lambda_dls;
  Eigen::VectorXd inv_damped(sigma.size());
  Eigen::VectorXd jpj_diag(sigma.size());
  for (int i = 0; i < sigma.size(); ++i) {
    const double s2 = sigma[i] * sigma[i];
    inv_damped[i] = (s2 + l2 > 0.0) ? sigma[i] / (s2 + l2) : 0.0;
    jpj_diag[i] = (s2 + l2 > 0.0) ? s2 / (s2 + l2) : 0.0;
  }
  const Eigen::MatrixXd v = svd.matrixV();
  const Eigen::VectorXd particular =
      v * (inv_damped.asDiagonal() * (svd.matrixU().transpose() * x_dot_cmd));
  const Eigen::MatrixXd null_projector =
      Eigen::MatrixXd::Identity(8, 8) - v * jpj_diag.asDiagonal() * v.transpose();

  RedundancySolution sol;
  sol.extended = particular + null_projector * (-w_gain * w);
  sol.q_dot = sol.extended.head<kNumJoints>();
  sol.eta_dot = sol.extended[kNumJoints];
  return sol;
}

/// Uniformly scales the extended rate vector so no joint exceeds the limit;
/// the direction of motion is preserved. Returns true when scaling applied.
inline bool saturate_rates(JointVector& q_dot, double& eta_dot,
                           double qdot_limit) {
  const double peak = q_dot.cwiseAbs().maxCoeff();
  if (peak <= qdot_limit) return false;
  const double scale = qdot_limit / peak;
  q_dot *= scale;
  eta_dot *= scale;
  return true;
}

}  // namespace rcmsim
