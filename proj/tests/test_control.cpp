#include <catch2/catch_amalgamated.hpp>

#include "rcmsim/builtin_models.hpp"
#include "rcmsim/control.hpp"
#include "rcmsim/rcm.hpp"

#include "oracles.hpp"

using namespace rcmsim;

namespace {

Jacobian6x8 random_task_jacobian(std::mt19937_64& rng) {
  const ManipulatorModel model = generic_7dof();
  const JointVector q = oracles::random_joint_vector(model, rng);
  const KinematicsSample kin = compute_kinematics(model, q);
  const Vec3 d = kin.pose_ins.position - kin.pose_ee.position;
  return total_jacobian(
      kin.jacobian_ins,
      jacobian_rcm(kin.jacobian_ee, kin.jacobian_ins, d, 0.25));
}

}  // namespace

TEST_CASE("projection matrix onto the shaft direction") {
  SECTION("axis-aligned shaft") {
    const Mat3 omega = projection_matrix(Vec3(0, 0, 0.4));
    Mat3 expected = Mat3::Zero();
    expected(2, 2) = 1.0;
    CHECK((omega - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("diagonal shaft gives the hand-computed outer product") {
    const Vec3 d = 0.4 * Vec3(1, 1, 0).normalized();
    const Mat3 omega = projection_matrix(d);
    Mat3 expected;
    expected << 0.5, 0.5, 0, 0.5, 0.5, 0, 0, 0, 0;
    CHECK((omega - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("projector identities") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 300; ++i) {
      const Vec3 d = oracles::random_unit_vec3(rng) * 0.5;
      const Mat3 omega = projection_matrix(d);
      CHECK((omega * omega - omega).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((omega - omega.transpose()).cwiseAbs().maxCoeff() < 1e-15);
      CHECK(((Mat3::Identity() - omega) * d).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SECTION("degenerate direction is rejected") {
    CHECK_THROWS_AS(projection_matrix(Vec3::Zero()), GeometryError);
    CHECK_THROWS_AS(projection_matrix(Vec3(0, 0, 1e-10)), GeometryError);
  }
}

TEST_CASE("admittance velocity") {
  const Vec3 d(0, 0, 0.4);

  SECTION("zero force error commands zero velocity") {
    const Vec3 f(1.2, -0.3, 0.5);
    CHECK(admittance_velocity(f, f, d, 0.1).norm() == 0.0);
  }
  SECTION("shaft-parallel force is rejected") {
    const Vec3 v = admittance_velocity(Vec3(0, 0, 3.0), Vec3::Zero(), d, 0.1);
    CHECK(v.norm() < 1e-10);
  }
  SECTION("hand-applied axis-aligned case") {
    const Vec3 v = admittance_velocity(Vec3(2, 0, 1), Vec3::Zero(), d, 0.1);
    CHECK((v - Vec3(0.2, 0, 0)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("always perpendicular to the shaft") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 1000; ++i) {
      const Vec3 dd = oracles::random_unit_vec3(rng) * 0.45;
      const Vec3 f = oracles::random_vec3(rng, 10.0);
      const Vec3 v = admittance_velocity(f, Vec3::Zero(), dd, 0.1);
      CHECK(std::abs(v.dot(dd)) < 1e-10);
    }
  }
  SECTION("exactly linear in the admittance gain") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
      const Vec3 dd = oracles::random_unit_vec3(rng) * 0.45;
      const Vec3 f = oracles::random_vec3(rng, 10.0);
      const Vec3 v1 = admittance_velocity(f, Vec3::Zero(), dd, 0.1);
      const Vec3 v2 = admittance_velocity(f, Vec3::Zero(), dd, 0.2);
      CHECK(v2 == 2.0 * v1);  // doubling the gain is exact in IEEE754
    }
  }
  SECTION("moves along the projected force error") {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 200; ++i) {
      const Vec3 dd = oracles::random_unit_vec3(rng) * 0.45;
      const Vec3 f = oracles::random_vec3(rng, 5.0);
      const Vec3 v = admittance_velocity(f, Vec3::Zero(), dd, 0.1);
      const Mat3 perp = Mat3::Identity() - projection_matrix(dd);
      CHECK(v.dot(perp * f) >= 0.0);
    }
  }
}

TEST_CASE("build_command stacks gains on both error channels") {
  GainSet gains;
  const Vec3 d(0, 0, 0.4);

  SECTION("zero errors give a zero command") {
    CHECK(build_command(Vec3::Zero(), Vec3::Zero(), gains, d).norm() == 0.0);
  }
  SECTION("position error through the shipped K_ins") {
    const Vec6 cmd = build_command(Vec3(0.01, 0, 0), Vec3::Zero(), gains, d);
    Vec6 expected;
    expected << 0.2, 0, 0, 0, 0, 0;
    CHECK((cmd - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("shaft-axis force error leaves the RCM rows empty") {
    const Vec6 cmd = build_command(Vec3::Zero(), Vec3(0, 0, 4.0), gains, d);
    CHECK(cmd.head<3>().norm() == 0.0);
    CHECK(cmd.tail<3>().norm() < 1e-10);
  }
}

TEST_CASE("null-space gradient of the eta objective") {
  CHECK(null_space_gradient(0.25, 0.25).norm() == 0.0);

  const ExtendedVector w = null_space_gradient(0.35, 0.25);
  CHECK(w.head<7>().norm() == 0.0);
  CHECK(std::abs(w[7] - 0.10) < 1e-15);

  // gradient check against the quadratic cost itself
  auto cost = [](double eta) { return 0.5 * (eta - 0.25) * (eta - 0.25); };
  const double h = 1e-5;
  const double fd = (cost(0.35 + h) - cost(0.35 - h)) / (2.0 * h);
  CHECK(std::abs(fd - w[7]) < 1e-8);
}

TEST_CASE("solve_redundancy") {
  std::mt19937_64 rng(31);

  SECTION("zero inputs give the zero solution") {
    const Jacobian6x8 j = random_task_jacobian(rng);
    const RedundancySolution sol =
        solve_redundancy(j, Vec6::Zero(), ExtendedVector::Zero(), 0.0, 1.0);
    CHECK(sol.extended.norm() == 0.0);
  }

  SECTION("pure secondary motion stays in the null space") {
    for (int i = 0; i < 50; ++i) {
      const Jacobian6x8 j = random_task_jacobian(rng);
      ExtendedVector w = ExtendedVector::Zero();
      w[7] = 0.2;
      const RedundancySolution sol =
          solve_redundancy(j, Vec6::Zero(), w, 0.0, 1.0);
      CHECK((j * sol.extended).norm() < 1e-9);
    }
  }

  SECTION("matches the SVD least-norm oracle at lambda = 0") {
    for (int i = 0; i < 50; ++i) {
      const Jacobian6x8 j = random_task_jacobian(rng);
      Vec6 cmd;
      for (int k = 0; k < 6; ++k) cmd[k] = oracles::random_vec3(rng)[0] * 0.1;
      ExtendedVector w = ExtendedVector::Zero();
      w[7] = oracles::random_vec3(rng)[1];

      const RedundancySolution sol = solve_redundancy(j, cmd, w, 0.0, 1.3);
      const Eigen::VectorXd ref = oracles::svd_least_norm_with_nullspace(
          Eigen::MatrixXd(j), cmd, Eigen::VectorXd(-1.3 * w));
      CHECK((sol.extended - ref).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  SECTION("constraint residual vanishes at full rank") {
    for (int i = 0; i < 50; ++i) {
      const Jacobian6x8 j = random_task_jacobian(rng);
      Vec6 cmd;
      for (int k = 0; k < 6; ++k) cmd[k] = oracles::random_vec3(rng)[0] * 0.1;
      const RedundancySolution sol =
          solve_redundancy(j, cmd, null_space_gradient(0.4, 0.25), 0.0, 1.0);
      CHECK((j * sol.extended - cmd).norm() < 1e-9);
    }
  }

  SECTION("null-space transparency bound") {
    for (int i = 0; i < 50; ++i) {
      const Jacobian6x8 j = random_task_jacobian(rng);
      ExtendedVector w;
      for (int k = 0; k < 8; ++k) w[k] = oracles::random_vec3(rng)[0];
      const RedundancySolution sol =
          solve_redundancy(j, Vec6::Zero(), w, 0.0, 1.0);
      CHECK((j * sol.extended).norm() <= 1e-8 * w.norm());
    }
  }

  SECTION("near-singular system is refused with lambda = 0") {
    const ManipulatorModel model = generic_7dof();
    // stretched-out configuration: all z axes collinear
    const KinematicsSample kin =
        compute_kinematics(model, JointVector::Zero());
    const Vec3 d = kin.pose_ins.position - kin.pose_ee.position;
    const Jacobian6x8 j = total_jacobian(
        kin.jacobian_ins,
        jacobian_rcm(kin.jacobian_ee, kin.jacobian_ins, d, 0.25));
    CHECK_THROWS_AS(
        solve_redundancy(j, Vec6::Ones(), ExtendedVector::Zero(), 0.0, 1.0),
        SingularityError);
    // damping makes the same system solvable
    CHECK_NOTHROW(
        solve_redundancy(j, Vec6::Ones(), ExtendedVector::Zero(), 1e-4, 1.0));
  }

  SECTION("descending the secondary cost") {
    for (int i = 0; i < 20; ++i) {
      const Jacobian6x8 j = random_task_jacobian(rng);
      double eta = 0.45;
      const double eta0 = 0.25;
      double prev_cost = (eta - eta0) * (eta - eta0);
      for (int step = 0; step < 5; ++step) {
        const RedundancySolution sol = solve_redundancy(
            j, Vec6::Zero(), null_space_gradient(eta, eta0), 0.0, 1.0);
        eta += sol.eta_dot * 0.05;
        const double cost = (eta - eta0) * (eta - eta0);
        CHECK(cost < prev_cost);
        prev_cost = cost;
      }
    }
  }
}

TEST_CASE("rate saturation preserves direction") {
  JointVector q_dot;
  q_dot << 4.0, -1.0, 0.5, 0, 0, 0, 2.0;
  double eta_dot = 0.8;
  const JointVector before = q_dot;

  CHECK(saturate_rates(q_dot, eta_dot, 2.0));
  CHECK(q_dot.cwiseAbs().maxCoeff() == Catch::Approx(2.0));
  CHECK((q_dot - 0.5 * before).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(eta_dot == Catch::Approx(0.4));

  JointVector small = JointVector::Constant(0.5);
  double small_eta = 0.1;
  CHECK_FALSE(saturate_rates(small, small_eta, 2.0));
  CHECK(small == JointVector::Constant(0.5));
}

TEST_CASE("gain set validation") {
  GainSet g;
  CHECK_NOTHROW(g.validate());
  g.k_adm = 0.0;  // admittance ablation must stay expressible
  CHECK_NOTHROW(g.validate());

  GainSet bad = GainSet{};
  bad.k_ins = Vec3(20, -1, 20);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = GainSet{};
  bad.eta0 = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = GainSet{};
  bad.lambda_dls = -1e-4;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
