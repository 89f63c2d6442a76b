#include <catch2/catch_amalgamated.hpp>

#include "rcmsim/builtin_models.hpp"
#include "rcmsim/rcm.hpp"

#include "oracles.hpp"

using namespace rcmsim;

TEST_CASE("rcm_position interpolates between the chain points") {
  const Vec3 x_ee(0, 0, 0);
  const Vec3 x_ins(0, 0, 0.4);

  // endpoint limit
  CHECK((rcm_position(x_ee, x_ins, 1e-12) - Vec3(0, 0, 0)).norm() < 1e-9);
  // shipped default eta0 = 0.25
  CHECK((rcm_position(x_ee, x_ins, 0.25) - Vec3(0, 0, 0.1)).norm() < 1e-15);

  CHECK_THROWS_AS(rcm_position(x_ee, x_ins, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rcm_position(x_ee, x_ins, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rcm_position(x_ee, x_ins, -0.2), std::invalid_argument);
  CHECK_THROWS_AS(rcm_position(x_ee, x_ins, 1.3), std::invalid_argument);
}

TEST_CASE("rcm geometry fields are exact") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a = oracles::random_vec3(rng);
    const Vec3 b = a + oracles::random_unit_vec3(rng) * 0.4;
    const RcmGeometry g = make_rcm_geometry(a, b, 0.3);
    CHECK(g.d_ins == b - a);
    CHECK(g.x_rcm == a + 0.3 * (b - a));
  }
  CHECK_THROWS_AS(make_rcm_geometry(Vec3(1, 2, 3), Vec3(1, 2, 3), 0.5),
                  GeometryError);
}

TEST_CASE("interpolation symmetry of the RCM point") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ue(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    const Vec3 a = oracles::random_vec3(rng);
    const Vec3 b = oracles::random_vec3(rng);
    const double eta = ue(rng);
    const Vec3 fwd = rcm_position(a, b, eta);
    const Vec3 rev = rcm_position(b, a, 1.0 - eta);
    CHECK((fwd - rev).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("jacobian_rcm interpolation endpoints") {
  std::mt19937_64 rng(5);
  Jacobian3x7 j_ee, j_ins;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < kNumJoints; ++c) {
      j_ee(r, c) = oracles::random_vec3(rng)[0];
      j_ins(r, c) = oracles::random_vec3(rng)[1];
    }
  }
  const Vec3 d(0.1, -0.2, 0.35);

  SECTION("eta -> 0 recovers the end-effector block") {
    const Jacobian3x8 j = jacobian_rcm(j_ee, j_ins, d, 1e-300);
    CHECK((j.leftCols<7>() - j_ee).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(j.col(7) == d);
  }
  SECTION("identical point jacobians collapse the eta term") {
    const Jacobian3x8 j = jacobian_rcm(j_ee, j_ee, d, 0.7);
    CHECK(j.leftCols<7>() == j_ee);
    CHECK(j.col(7) == d);
  }
}

TEST_CASE("RCM jacobian matches finite differences") {
  const ManipulatorModel model = generic_7dof();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ue(0.1, 0.9);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const JointVector q = oracles::random_joint_vector(model, rng);
    const double eta = ue(rng);

    const KinematicsSample kin = compute_kinematics(model, q);
    const Vec3 d = kin.pose_ins.position - kin.pose_ee.position;
    const Jacobian3x8 j =
        jacobian_rcm(kin.jacobian_ee, kin.jacobian_ins, d, eta);
    const Jacobian3x8 j_fd = oracles::fd_jacobian_rcm(model, q, eta);
    worst = std::max(worst, (j - j_fd).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("RCM velocity consistency along a time-parameterized path") {
  // q(t), eta(t) smooth; compare J_rcm * (qdot, etadot) with the central
  // difference of the RCM position itself
  const ManipulatorModel model = generic_7dof();
  const JointVector q0 =
      (JointVector() << 0.2, 0.9, -0.4, 1.1, 0.3, 0.7, -0.5).finished();
  JointVector amp;
  amp << 0.3, -0.2, 0.25, 0.15, -0.35, 0.2, 0.3;

  auto q_at = [&](double t) -> JointVector {
    JointVector q = q0;
    for (int i = 0; i < kNumJoints; ++i) {
      q[i] += amp[i] * std::sin(t + 0.3 * i);
    }
    return q;
  };
  auto eta_at = [](double t) { return 0.3 + 0.1 * std::sin(0.7 * t); };
  auto rcm_at = [&](double t) {
    const auto [ee, ins] = forward_kinematics(model, q_at(t));
    return rcm_position(ee.position, ins.position, eta_at(t));
  };

  for (double t : {0.0, 0.4, 1.3, 2.9}) {
    JointVector qdot;
    for (int i = 0; i < kNumJoints; ++i) {
      qdot[i] = amp[i] * std::cos(t + 0.3 * i);
    }
    const double etadot = 0.1 * 0.7 * std::cos(0.7 * t);

    const KinematicsSample kin = compute_kinematics(model, q_at(t));
    const Vec3 d = kin.pose_ins.position - kin.pose_ee.position;
    const Jacobian3x8 j =
        jacobian_rcm(kin.jacobian_ee, kin.jacobian_ins, d, eta_at(t));
    ExtendedVector rates;
    rates << qdot, etadot;

    const double h = 1e-6;
    const Vec3 v_fd = (rcm_at(t + h) - rcm_at(t - h)) / (2.0 * h);
    CHECK(((j * rates) - v_fd).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("total jacobian stacks the two constraints") {
  SECTION("zero blocks pass through") {
    const Jacobian3x7 z = Jacobian3x7::Zero();
    const Vec3 d(0, 0, 0.4);
    const Jacobian6x8 j = total_jacobian(z, jacobian_rcm(z, z, d, 0.25));
    Jacobian6x8 expected = Jacobian6x8::Zero();
    expected.block<3, 1>(3, 7) = d;
    CHECK(j == expected);
  }

  SECTION("instrument rows ignore eta_dot") {
    std::mt19937_64 rng(8);
    const ManipulatorModel model = generic_7dof();
    for (int i = 0; i < 50; ++i) {
      const JointVector q = oracles::random_joint_vector(model, rng);
      const KinematicsSample kin = compute_kinematics(model, q);
      const Vec3 d = kin.pose_ins.position - kin.pose_ee.position;
      const Jacobian6x8 j = total_jacobian(
          kin.jacobian_ins,
          jacobian_rcm(kin.jacobian_ee, kin.jacobian_ins, d, 0.25));

      ExtendedVector rates;
      rates << oracles::random_vec3(rng), oracles::random_vec3(rng),
          oracles::random_vec3(rng)[2];
      const Vec3 top = j.topRows<3>() * rates;
      const Vec3 direct = kin.jacobian_ins * rates.head<7>();
      CHECK((top - direct).cwiseAbs().maxCoeff() < 1e-14);
    }
  }

  SECTION("rank 6 with 2-DoF redundancy at random configurations") {
    std::mt19937_64 rng(9);
    const ManipulatorModel model = generic_7dof();
    for (int i = 0; i < 100; ++i) {
      const JointVector q = oracles::random_joint_vector(model, rng);
      const KinematicsSample kin = compute_kinematics(model, q);
      const Vec3 d = kin.pose_ins.position - kin.pose_ee.position;
      const Jacobian6x8 j = total_jacobian(
          kin.jacobian_ins,
          jacobian_rcm(kin.jacobian_ee, kin.jacobian_ins, d, 0.25));
      Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(j)};
      const auto& s = svd.singularValues();
      int rank = 0;
      for (int k = 0; k < s.size(); ++k) {
        rank += (s[k] > 1e-8 * s[0]) ? 1 : 0;
      }
      CHECK(rank == 6);
    }
  }
}
