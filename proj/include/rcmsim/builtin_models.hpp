#pragma once

#include <array>
#include <string>

#include "rcmsim/manipulator.hpp"

namespace rcmsim {

namespace detail {

inline Joint make_joint(const Vec3& translation, const Vec3& axis,
                        double limit) {
  Joint j;
  j.link.position = translation;
  j.axis = axis;
  j.min_position = -limit;
  j.max_position = limit;
  return j;
}

}  // namespace detail

/// Anthropomorphic shoulder(3)/elbow(1)/wrist(3) arm with round-number link
/// lengths. At q = 0 the chain is stretched straight up: the end-effector
/// sits at (0, 0, 1.0) and the instrument shaft points along world +z.
inline ManipulatorModel generic_7dof(double instrument_length = 0.4) {
  using detail::make_joint;
  const double big = 2.967;    // ~170 deg
  const double small = 2.094;  // ~120 deg
  std::array<Joint, kNumJoints> joints = {
      make_joint({0.0, 0.0, 0.30}, Vec3::UnitZ(), big),
      make_joint({0.0, 0.0, 0.0}, Vec3::UnitY(), small),
      make_joint({0.0, 0.0, 0.30}, Vec3::UnitZ(), big),
      make_joint({0.0, 0.0, 0.0}, Vec3::UnitY(), small),
      make_joint({0.0, 0.0, 0.25}, Vec3::UnitZ(), big),
      make_joint({0.0, 0.0, 0.0}, Vec3::UnitY(), small),
      make_joint({0.0, 0.0, 0.10}, Vec3::UnitZ(), big),
  };
  Pose ee_offset;
  ee_offset.position = {0.0, 0.0, 0.05};
  return ManipulatorModel("generic-7dof", joints, ee_offset,
                          instrument_length);
}

/// Seven-axis arm with the publicly listed Kuka iiwa link lengths
/// (0.34 / 0.4 / 0.4 / 0.126 m) and joint limits; the tool offset stands in
/// for an instrument-driving mechanism mounted on the flange.
inline ManipulatorModel iiwa_like(double instrument_length = 0.4) {
  using detail::make_joint;
  const double d170 = 2.967;
  const double d120 = 2.094;
  const double d175 = 3.054;
  std::array<Joint, kNumJoints> joints = {
      make_joint({0.0, 0.0, 0.34}, Vec3::UnitZ(), d170),
      make_joint({0.0, 0.0, 0.0}, Vec3::UnitY(), d120),
      make_joint({0.0, 0.0, 0.40}, Vec3::UnitZ(), d170),
      make_joint({0.0, 0.0, 0.0}, Vec3::UnitY(), d120),
      make_joint({0.0, 0.0, 0.40}, Vec3::UnitZ(), d170),
      make_joint({0.0, 0.0, 0.0}, Vec3::UnitY(), d120),
      make_joint({0.0, 0.0, 0.126}, Vec3::UnitZ(), d175),
  };
  Pose ee_offset;
  ee_offset.position = {0.0, 0.0, 0.08};
  return ManipulatorModel("iiwa-like", joints, ee_offset, instrument_length);
}

/// Looks up a built-in model by name ("generic-7dof" or "iiwa-like").
inline ManipulatorModel make_builtin_model(const std::string& name) {
  if (name == "generic-7dof") return generic_7dof();
  if (name == "iiwa-like") return iiwa_like();
  throw ConfigError("unknown builtin robot model: " + name);
}

}  // namespace rcmsim
