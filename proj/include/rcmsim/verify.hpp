#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rcmsim/builtin_models.hpp"
#include "rcmsim/control.hpp"
#include "rcmsim/environment.hpp"
#include "rcmsim/estimation.hpp"
#include "rcmsim/manipulator.hpp"
#include "rcmsim/rcm.hpp"

namespace rcmsim {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  // Test hook: corrupt one analytic Jacobian entry so the finite-difference
  // check is exercised on a known-bad input.
  bool perturb_jacobian = false;
  int configurations = 500;
  std::uint64_t seed = 20240901;
};

namespace detail {

inline JointVector random_q(const ManipulatorModel& model,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  JointVector q;
  for (int i = 0; i < kNumJoints; ++i) {
    const Joint& j = model.joints()[static_cast<std::size_t>(i)];
    const double half = 0.5 * (j.max_position - j.min_position);
    const double mid = 0.5 * (j.max_position + j.min_position);
    q[i] = mid + 0.8 * half * u(rng);
  }
  return q;
}

inline CheckResult check_jacobian_fd(const ManipulatorModel& model,
                                     const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  const double step = 1e-6;
  double worst = 0.0;
  for (int c = 0; c < opt.configurations; ++c) {
    const JointVector q = random_q(model, rng);
    const double eta = 0.25;
    KinematicsSample kin = compute_kinematics(model, q);
    if (opt.perturb_jacobian) kin.jacobian_ee(0, 0) += 1e-3;
    const Jacobian3x8 j_rcm = jacobian_rcm(
        kin.jacobian_ee, kin.jacobian_ins,
        kin.pose_ins.position - kin.pose_ee.position, eta);

    Jacobian3x7 fd_ee, fd_ins;
    Jacobian3x8 fd_rcm;
    for (int i = 0; i < kNumJoints; ++i) {
      JointVector qp = q, qm = q;
      qp[i] += step;
      qm[i] -= step;
      const auto [eep, insp] = forward_kinematics(model, qp);
      const auto [eem, insm] = forward_kinematics(model, qm);
      fd_ee.col(i) = (eep.position - eem.position) / (2.0 * step);
      fd_ins.col(i) = (insp.position - insm.position) / (2.0 * step);
      fd_rcm.col(i) = (rcm_position(eep.position, insp.position, eta) -
                       rcm_position(eem.position, insm.position, eta)) /
                      (2.0 * step);
    }
    fd_rcm.col(kNumJoints) =
        (rcm_position(kin.pose_ee.position, kin.pose_ins.position,
                      eta + step) -
         rcm_position(kin.pose_ee.position, kin.pose_ins.position,
                      eta - step)) /
        (2.0 * step);

    worst = std::max(worst,
                     (fd_ee - kin.jacobian_ee).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (fd_ins - kin.jacobian_ins).cwiseAbs().maxCoeff());
    worst = std::max(worst, (fd_rcm - j_rcm).cwiseAbs().maxCoeff());
  }
  CheckResult r;
  r.name = "jacobian-fd-" + model.name();
  r.pass = worst < 1e-5;
  std::ostringstream d;
  d << "max |J_fd - J| = " << worst << " over " << opt.configurations
    << " configurations (tol 1e-5)";
  r.detail = d.str();
  return r;
}

inline CheckResult check_projector_identities(const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed + 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    Vec3 d(u(rng), u(rng), u(rng));
    if (d.norm() < 1e-3) continue;
    d *= 0.5;
    const Mat3 omega = projection_matrix(d);
    worst = std::max(worst, (omega * omega - omega).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (omega - omega.transpose()).cwiseAbs().maxCoeff());
    worst = std::max(
        worst, ((Mat3::Identity() - omega) * d).cwiseAbs().maxCoeff());
  }
  CheckResult r;
  r.name = "projector-identities";
  r.pass = worst < 1e-12;
  std::ostringstream d;
  d << "max identity residual = " << worst << " (tol 1e-12)";
  r.detail = d.str();
  return r;
}

inline CheckResult check_gamma_matrix(const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed + 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ue(0.05, 0.95);
  bool rank_ok = true;
  double worst_null = 0.0;
  double worst_skew = 0.0;
  for (int c = 0; c < 500; ++c) {
    Vec3 d(u(rng), u(rng), u(rng));
    if (d.norm() < 1e-3) continue;
    const double eta = ue(rng);
    const Mat6 gamma = build_gamma_matrix(d, eta);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gamma);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < 6; ++i) rank += (s[i] > 1e-8 * s[0]) ? 1 : 0;
    rank_ok = rank_ok && (rank == 5);
    Vec6 null_vec;
    null_vec << d, -d;
    worst_null =
        std::max(worst_null, (gamma * null_vec).cwiseAbs().maxCoeff());
    const Mat3 b = gamma.bottomLeftCorner<3, 3>();
    worst_skew =
        std::max(worst_skew, (b.transpose() + b).cwiseAbs().maxCoeff());
  }
  CheckResult r;
  r.name = "gamma-rank-nullspace";
  r.pass = rank_ok && worst_null == 0.0 && worst_skew == 0.0;
  std::ostringstream d;
  d << "rank==5 " << (rank_ok ? "ok" : "FAILED") << ", max |Gamma*(d,-d)| = "
    << worst_null << ", skew symmetry residual = " << worst_skew;
  r.detail = d.str();
  return r;
}

inline CheckResult check_estimator_round_trip(const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed + 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ue(0.05, 0.95);
  double worst_case1 = 0.0, worst_case2 = 0.0, worst_gamma = 0.0;
  for (int c = 0; c < 500; ++c) {
    Vec3 d(u(rng), u(rng), u(rng));
    if (d.norm() < 0.05) continue;
    const double eta = ue(rng);
    const Vec3 f_rcm(u(rng), u(rng), u(rng));
    const Vec3 f_ins(u(rng), u(rng), u(rng));

    const Wrench w1 = synthesize_base_wrench(f_rcm, Vec3::Zero(), d, eta);
    worst_case1 = std::max(
        worst_case1, (estimate_case1(w1) - f_rcm).cwiseAbs().maxCoeff());
    const auto g = gamma_criterion(w1, d, 1e-6);
    if (g.has_value()) {
      worst_gamma = std::max(worst_gamma, std::abs(*g - eta));
    }

    const Wrench w2 = synthesize_base_wrench(f_rcm, f_ins, d, eta);
    Vec6 truth;
    truth << f_ins, f_rcm;
    const Case2Estimate est = estimate_case2(w2, d, eta, truth);
    worst_case2 = std::max(
        worst_case2, (est.stacked - truth).cwiseAbs().maxCoeff());
  }
  CheckResult r;
  r.name = "estimator-round-trip";
  r.pass = worst_case1 < 1e-12 && worst_case2 < 1e-9 && worst_gamma < 1e-9;
  std::ostringstream d;
  d << "case1 err = " << worst_case1 << ", case2 err = " << worst_case2
    << ", gamma err = " << worst_gamma;
  r.detail = d.str();
  return r;
}

inline CheckResult check_redundancy_solver(const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed + 4);
  const ManipulatorModel model = generic_7dof();
  double worst_residual = 0.0, worst_null = 0.0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int solved = 0;
  for (int c = 0; c < 200; ++c) {
    const JointVector q = random_q(model, rng);
    const KinematicsSample kin = compute_kinematics(model, q);
    const Vec3 d = kin.pose_ins.position - kin.pose_ee.position;
    const Jacobian3x8 j_rcm =
        jacobian_rcm(kin.jacobian_ee, kin.jacobian_ins, d, 0.25);
    const Jacobian6x8 j = total_jacobian(kin.jacobian_ins, j_rcm);
    Vec6 cmd;
    for (int i = 0; i < 6; ++i) cmd[i] = 0.05 * u(rng);
    ExtendedVector w = ExtendedVector::Zero();
    w[kNumJoints] = 0.1;
    try {
      const RedundancySolution sol = solve_redundancy(j, cmd, w, 0.0, 1.0);
      worst_residual =
          std::max(worst_residual, (j * sol.extended - cmd).norm());
      const RedundancySolution only_null =
          solve_redundancy(j, Vec6::Zero(), w, 0.0, 1.0);
      worst_null = std::max(worst_null, (j * only_null.extended).norm());
      ++solved;
    } catch (const SingularityError&) {
      // skip singular draws; the undamped solver is supposed to refuse them
    }
  }
  CheckResult r;
  r.name = "redundancy-solver";
  r.pass = solved > 150 && worst_residual < 1e-9 && worst_null < 1e-9;
  std::ostringstream d;
  d << "constraint residual = " << worst_residual
    << ", null-space leakage = " << worst_null << " over " << solved
    << " solves";
  r.detail = d.str();
  return r;
}

}  // namespace detail

/// Built-in self checks: Jacobians against finite differences, projector
/// identities, equilibrium-matrix structure, estimator round trips, and the
/// redundancy solver.
inline std::vector<CheckResult> run_verification(VerifyOptions opt = {}) {
  std::vector<CheckResult> results;
  results.push_back(detail::check_jacobian_fd(generic_7dof(), opt));
  VerifyOptions clean = opt;
  clean.perturb_jacobian = false;  // the hook targets one named check only
  results.push_back(detail::check_jacobian_fd(iiwa_like(), clean));
  results.push_back(detail::check_projector_identities(clean));
  results.push_back(detail::check_gamma_matrix(clean));
  results.push_back(detail::check_estimator_round_trip(clean));
  results.push_back(detail::check_redundancy_solver(clean));
  return results;
}

}  // namespace rcmsim
