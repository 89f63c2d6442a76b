#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace rcmsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr int kNumJoints = 7;

using JointVector = Eigen::Matrix<double, kNumJoints, 1>;     // q, rad
using ExtendedVector = Eigen::Matrix<double, kNumJoints + 1, 1>;  // (q, eta)
using Jacobian3x7 = Eigen::Matrix<double, 3, kNumJoints>;
using Jacobian3x8 = Eigen::Matrix<double, 3, kNumJoints + 1>;
using Jacobian6x8 = Eigen::Matrix<double, 6, kNumJoints + 1>;

/// Rigid pose: world-from-frame rotation plus position in meters.
struct Pose {
  Vec3 position = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();
};

/// Checks that a rotation matrix is orthonormal with det +1.
inline bool is_rigid_rotation(const Mat3& r, double tol = 1e-9) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

enum class Frame { World, SensorBase };

/// Force/moment pair at a named frame. Forces in N, moments in N·m.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  Frame frame = Frame::World;
};

/// Cross-product matrix: skew(v) * u == v.cross(u).
inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

/// Rotates wrench components into the world frame. `rotation` is
/// world-from-sensor.
inline Wrench expressed_in_world(const Wrench& w, const Mat3& rotation) {
  if (w.frame == Frame::World) return w;
  return Wrench{rotation * w.force, rotation * w.moment, Frame::World};
}

/// Rotates world-frame wrench components into the sensor frame.
inline Wrench expressed_in_sensor(const Wrench& w, const Mat3& rotation) {
  if (w.frame == Frame::SensorBase) return w;
  return Wrench{rotation.transpose() * w.force,
                rotation.transpose() * w.moment, Frame::SensorBase};
}

/// Degenerate geometry (zero-length shaft, rank-deficient estimation matrix).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Near-singular Jacobian encountered with an undamped pseudoinverse.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure during a simulation run; carries the simulated time.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(double t, const std::string& what)
      : std::runtime_error("t=" + std::to_string(t) + " s: " + what),
        time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace rcmsim
