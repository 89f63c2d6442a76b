#include <catch2/catch_amalgamated.hpp>

#include "rcmsim/builtin_models.hpp"
#include "rcmsim/manipulator.hpp"

#include "oracles.hpp"

using namespace rcmsim;

namespace {

// Minimal valid chain: all joints about +z at the origin, instrument along
// +z. Useful for geometry that is easy to reason about by hand.
ManipulatorModel stub_model(const Vec3& ee_translation,
                            double instrument_length) {
  std::array<Joint, kNumJoints> joints;
  for (auto& j : joints) {
    j.axis = Vec3::UnitZ();
    j.link = Pose{};
  }
  Pose ee;
  ee.position = ee_translation;
  return ManipulatorModel("stub", joints, ee, instrument_length);
}

}  // namespace

TEST_CASE("zero configuration of generic-7dof") {
  const ManipulatorModel model = generic_7dof();
  const auto [ee, ins] = forward_kinematics(model, JointVector::Zero());
  // chain stretched along +z: 0.30+0.30+0.25+0.10+0.05
  CHECK((ee.position - Vec3(0, 0, 1.0)).norm() < 1e-12);
  CHECK((ee.orientation - Mat3::Identity()).norm() < 1e-12);
  CHECK((ins.position - Vec3(0, 0, 1.4)).norm() < 1e-12);
}

TEST_CASE("pure instrument offset from a chain at the origin") {
  const ManipulatorModel model = stub_model(Vec3::Zero(), 0.4);
  const auto [ee, ins] = forward_kinematics(model, JointVector::Zero());
  CHECK(ee.position.norm() == 0.0);
  CHECK((ins.position - Vec3(0, 0, 0.4)).norm() < 1e-15);
}

TEST_CASE("forward kinematics matches the product-of-transforms oracle") {
  std::mt19937_64 rng(42);
  for (const ManipulatorModel& model : {generic_7dof(), iiwa_like()}) {
    for (int i = 0; i < 50; ++i) {
      const JointVector q = oracles::random_joint_vector(model, rng);
      const auto [ee, ins] = forward_kinematics(model, q);
      const auto [ee_ref, ins_ref] =
          oracles::fk_product_of_transforms(model, q);
      CHECK((ee.position - ee_ref).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((ins.position - ins_ref).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("jacobian column is the planar rotation tangent") {
  // every joint axis +z through the origin, point at (r, 0, 0)
  const double r = 0.25;
  const ManipulatorModel model = stub_model(Vec3(r, 0, 0), 0.1);
  const Jacobian3x7 j = jacobian_ee(model, JointVector::Zero());
  for (int c = 0; c < kNumJoints; ++c) {
    CHECK((j.col(c) - Vec3(0, r, 0)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("analytic jacobians match central finite differences") {
  std::mt19937_64 rng(7);
  for (const ManipulatorModel& model : {generic_7dof(), iiwa_like()}) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const JointVector q = oracles::random_joint_vector(model, rng);
      const KinematicsSample kin = compute_kinematics(model, q);
      worst = std::max(
          worst, (kin.jacobian_ee -
                  oracles::fd_jacobian(model, q, oracles::Point::Ee))
                     .cwiseAbs()
                     .maxCoeff());
      worst = std::max(
          worst, (kin.jacobian_ins -
                  oracles::fd_jacobian(model, q, oracles::Point::Ins))
                     .cwiseAbs()
                     .maxCoeff());
    }
    INFO(model.name());
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("rotation about the shaft axis moves no shaft point") {
  // at q = 0 the generic model's joint-7 axis is collinear with the shaft
  const ManipulatorModel model = generic_7dof();
  const KinematicsSample kin = compute_kinematics(model, JointVector::Zero());
  const Jacobian3x7 diff = kin.jacobian_ins - kin.jacobian_ee;
  CHECK(diff.col(6).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("instrument stays rigid for random configurations") {
  std::mt19937_64 rng(11);
  const ManipulatorModel model = generic_7dof();
  for (int i = 0; i < 200; ++i) {
    const JointVector q = oracles::random_joint_vector(model, rng);
    const auto [ee, ins] = forward_kinematics(model, q);
    CHECK(std::abs((ins.position - ee.position).norm() -
                   model.instrument_length()) < 1e-9);
    CHECK(is_rigid_rotation(ee.orientation, 1e-9));
  }
}

TEST_CASE("forward kinematics is deterministic") {
  const ManipulatorModel model = iiwa_like();
  JointVector q;
  q << 0.3, -0.7, 1.1, 0.9, -1.3, 0.4, 2.0;
  const KinematicsSample a = compute_kinematics(model, q);
  const KinematicsSample b = compute_kinematics(model, q);
  CHECK(a.pose_ee.position == b.pose_ee.position);
  CHECK(a.pose_ins.position == b.pose_ins.position);
  CHECK(a.jacobian_ee == b.jacobian_ee);
  CHECK(a.jacobian_ins == b.jacobian_ins);
}

TEST_CASE("model construction enforces the invariants") {
  std::array<Joint, kNumJoints> joints;
  for (auto& j : joints) j.axis = Vec3::UnitZ();

  SECTION("instrument length must be positive") {
    CHECK_THROWS_AS(ManipulatorModel("m", joints, Pose{}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ManipulatorModel("m", joints, Pose{}, -0.1),
                    std::invalid_argument);
  }
  SECTION("axes must be unit vectors") {
    joints[3].axis = Vec3(0, 0, 2.0);
    CHECK_THROWS_AS(ManipulatorModel("m", joints, Pose{}, 0.4),
                    std::invalid_argument);
  }
  SECTION("link rotations must be orthonormal") {
    joints[2].link.orientation(0, 0) = 1.5;
    CHECK_THROWS_AS(ManipulatorModel("m", joints, Pose{}, 0.4),
                    std::invalid_argument);
  }
}

TEST_CASE("joint limit check is soft") {
  const ManipulatorModel model = generic_7dof();
  JointVector q = JointVector::Zero();
  CHECK(model.within_limits(q));
  q[1] = 3.0;  // beyond the ~120 deg limit
  CHECK_FALSE(model.within_limits(q));
  CHECK_NOTHROW(forward_kinematics(model, q));  // warning-level, not an error
}
