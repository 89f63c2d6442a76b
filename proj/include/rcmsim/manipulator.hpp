#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "rcmsim/types.hpp"

namespace rcmsim {

/// One revolute joint: a fixed link transform from the previous joint frame
/// to this joint's pivot, the rotation axis in the pivot frame, and position
/// limits in radians.
struct Joint {
  Pose link;
  Vec3 axis = Vec3::UnitZ();
  double min_position = -M_PI;
  double max_position = M_PI;
};

/// Kinematic description of a 7-DoF serial arm carrying a rigid instrument.
///
/// The chain is world -> link_1 -> R(axis_1, q_1) -> link_2 -> ... ->
/// R(axis_7, q_7) -> ee_offset. The instrument shaft leaves the end-effector
/// along the end-effector frame's +z axis; the wrist center sits
/// instrument_length meters down the shaft.
class ManipulatorModel {
 public:
  ManipulatorModel(std::string name, std::array<Joint, kNumJoints> joints,
                   Pose ee_offset, double instrument_length)
      : name_(std::move(name)),
        joints_(std::move(joints)),
        ee_offset_(std::move(ee_offset)),
        instrument_length_(instrument_length) {
    if (!(instrument_length_ > 0.0)) {
      throw std::invalid_argument("instrument_length must be > 0");
    }
    if (!is_rigid_rotation(ee_offset_.orientation)) {
      throw std::invalid_argument("ee_offset rotation is not orthonormal");
    }
    for (int i = 0; i < kNumJoints; ++i) {
      const Joint& j = joints_[static_cast<std::size_t>(i)];
      if (!is_rigid_rotation(j.link.orientation)) {
        throw std::invalid_argument("joint " + std::to_string(i + 1) +
                                    " link rotation is not orthonormal");
      }
      if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("joint " + std::to_string(i + 1) +
                                    " axis is not a unit vector");
      }
      if (!(j.min_position < j.max_position)) {
        throw std::invalid_argument("joint " + std::to_string(i + 1) +
                                    " has an empty limit interval");
      }
    }
  }

  const std::string& name() const { return name_; }
  const std::array<Joint, kNumJoints>& joints() const { return joints_; }
  const Pose& ee_offset() const { return ee_offset_; }
  double instrument_length() const { return instrument_length_; }

  bool within_limits(const JointVector& q) const {
    for (int i = 0; i < kNumJoints; ++i) {
      const Joint& j = joints_[static_cast<std::size_t>(i)];
      if (q[i] < j.min_position || q[i] > j.max_position) return false;
    }
    return true;
  }

 private:
  std::string name_;
  std::array<Joint, kNumJoints> joints_;
  Pose ee_offset_;
  double instrument_length_;
};

/// Poses and position Jacobians of the end-effector and instrument wrist
/// center at one configuration.
struct KinematicsSample {
  Pose pose_ee;
  Pose pose_ins;
  Jacobian3x7 jacobian_ee;
  Jacobian3x7 jacobian_ins;
};

/// Evaluates the full chain once: both poses and both 3x7 position
/// Jacobians. Column i of each Jacobian is z_i x (p - p_i) with z_i the
/// world-frame joint axis and p_i the joint origin.
inline KinematicsSample compute_kinematics(const ManipulatorModel& model,
                                           const JointVector& q) {
  Mat3 rot = Mat3::Identity();
  Vec3 pos = Vec3::Zero();
  std::array<Vec3, kNumJoints> joint_origin;
  std::array<Vec3, kNumJoints> joint_axis;

  for (int i = 0; i < kNumJoints; ++i) {
    const Joint& j = model.joints()[static_cast<std::size_t>(i)];
    pos += rot * j.link.position;
    rot *= j.link.orientation;
    joint_origin[static_cast<std::size_t>(i)] = pos;
    joint_axis[static_cast<std::size_t>(i)] = rot * j.axis;
    rot *= Eigen::AngleAxisd(q[i], j.axis).toRotationMatrix();
  }

  KinematicsSample out;
  out.pose_ee.position = pos + rot * model.ee_offset().position;
  out.pose_ee.orientation = rot * model.ee_offset().orientation;
  out.pose_ins.orientation = out.pose_ee.orientation;
  out.pose_ins.position =
      out.pose_ee.position +
      model.instrument_length() * (out.pose_ee.orientation * Vec3::UnitZ());

  for (int i = 0; i < kNumJoints; ++i) {
    const Vec3& z = joint_axis[static_cast<std::size_t>(i)];
    const Vec3& p = joint_origin[static_cast<std::size_t>(i)];
    out.jacobian_ee.col(i) = z.cross(out.pose_ee.position - p);
    out.jacobian_ins.col(i) = z.cross(out.pose_ins.position - p);
  }
  return out;
}

inline std::pair<Pose, Pose> forward_kinematics(const ManipulatorModel& model,
                                                const JointVector& q) {
  KinematicsSample s = compute_kinematics(model, q);
  return {s.pose_ee, s.pose_ins};
}

inline Jacobian3x7 jacobian_ee(const ManipulatorModel& model,
                               const JointVector& q) {
  return compute_kinematics(model, q).jacobian_ee;
}

inline Jacobian3x7 jacobian_ins(const ManipulatorModel& model,
                                const JointVector& q) {
  return compute_kinematics(model, q).jacobian_ins;
}

}  // namespace rcmsim
