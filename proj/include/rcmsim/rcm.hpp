#pragma once

#include "rcmsim/types.hpp"

namespace rcmsim {

/// Extended configuration: joint positions plus the RCM interpolation
/// variable eta in (0, 1).
struct ExtendedState {
  JointVector q = JointVector::Zero();
  double eta = 0.25;
};

/// Instantaneous RCM geometry derived from the two chain points.
struct RcmGeometry {
  Vec3 x_ee;
  Vec3 x_ins;
  Vec3 d_ins;  // x_ins - x_ee
  Vec3 x_rcm;  // x_ee + eta * d_ins
};

/// Interpolated RCM point between the end-effector and the instrument wrist
/// center. eta outside (0, 1) signals a corrupted state and is rejected.
inline Vec3 rcm_position(const Vec3& x_ee, const Vec3& x_ins, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("rcm_position: eta must lie in (0,1), got " +
                                std::to_string(eta));
  }
  return x_ee + eta * (x_ins - x_ee);
}

inline RcmGeometry make_rcm_geometry(const Vec3& x_ee, const Vec3& x_ins,
                                     double eta) {
  RcmGeometry g;
  g.x_ee = x_ee;
  g.x_ins = x_ins;
  g.d_ins = x_ins - x_ee;
  if (!(g.d_ins.norm() > 0.0)) {
    throw GeometryError("instrument direction has zero length");
  }
  g.x_rcm = rcm_position(x_ee, x_ins, eta);
  return g;
}

/// RCM Jacobian over the extended coordinates (q, eta):
/// [ J_ee + eta (J_ins - J_ee) | d_ins ]. The first 7 columns map joint
/// rates, the last column maps eta_dot.
inline Jacobian3x8 jacobian_rcm(const Jacobian3x7& j_ee,
                                const Jacobian3x7& j_ins, const Vec3& d_ins,
                                double eta) {
  Jacobian3x8 j;
  j.leftCols<kNumJoints>() = j_ee + eta * (j_ins - j_ee);
  j.col(kNumJoints) = d_ins;
  return j;
}

/// Stacks the instrument and RCM constraints:
/// top rows [ J_ins | 0 ], bottom rows J_rcm. The zero column keeps eta_dot
/// out of the instrument constraint.
inline Jacobian6x8 total_jacobian(const Jacobian3x7& j_ins,
                                  const Jacobian3x8& j_rcm) {
  Jacobian6x8 j;
  j.topLeftCorner<3, kNumJoints>() = j_ins;
  j.topRightCorner<3, 1>().setZero();
  j.bottomRows<3>() = j_rcm;
  return j;
}

}  // namespace rcmsim
