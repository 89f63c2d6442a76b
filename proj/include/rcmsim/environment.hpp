#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "rcmsim/types.hpp"

namespace rcmsim {

/// Linear spring-damper compliance at the port of entry. Diagonal entries
/// stored as vectors; units N/m and N*s/m. The damping default keeps the
/// sampled admittance loop well inside its stability region
/// (k_adm * b_env < 1 with the one-tick sensor delay).
struct EnvironmentModel {
  Vec3 k_env = Vec3(500.0, 500.0, 500.0);
  Vec3 b_env = Vec3(2.0, 2.0, 2.0);

  void validate() const {
    if ((k_env.array() < 0.0).any() || (b_env.array() < 0.0).any()) {
      throw ConfigError("environment stiffness/damping must be >= 0");
    }
  }
};

struct TrocarState {
  Vec3 position;
  Vec3 velocity;
};

/// Trocar (port of entry) motion: fixed point, sinusoidal line, or sampled
/// path. Velocity is the exact derivative of position.
class TrocarTrajectory {
 public:
  enum class Kind { Static, LinearOscillation, CustomSamples };

  static TrocarTrajectory static_point(const Vec3& center) {
    TrocarTrajectory t;
    t.kind_ = Kind::Static;
    t.center_ = center;
    return t;
  }

  /// center + direction * amplitude * sin(2 pi t / period); amplitude is the
  /// half-excursion, so peak-to-peak travel is 2 * amplitude.
  static TrocarTrajectory linear_oscillation(const Vec3& center,
                                             const Vec3& direction,
                                             double amplitude, double period) {
    if (!(amplitude >= 0.0)) {
      throw ConfigError("trocar amplitude must be >= 0");
    }
    if (!(period > 0.0)) throw ConfigError("trocar period must be > 0");
    if (!(direction.norm() > 0.0)) {
      throw ConfigError("trocar direction must be nonzero");
    }
    TrocarTrajectory t;
    t.kind_ = Kind::LinearOscillation;
    t.center_ = center;
    t.direction_ = direction.normalized();
    t.amplitude_ = amplitude;
    t.period_ = period;
    return t;
  }

  static TrocarTrajectory from_samples(
      std::vector<std::pair<double, Vec3>> samples) {
    if (samples.size() < 2) {
      throw ConfigError("trocar custom_samples needs at least two samples");
    }
    if (!std::is_sorted(samples.begin(), samples.end(),
                        [](const auto& a, const auto& b) {
                          return a.first < b.first;
                        })) {
      throw ConfigError("trocar custom_samples must be sorted by time");
    }
    TrocarTrajectory t;
    t.kind_ = Kind::CustomSamples;
    t.samples_ = std::move(samples);
    return t;
  }

  Kind kind() const { return kind_; }
  const Vec3& center() const { return center_; }

  /// Re-anchors the trajectory's reference point; used to resolve "auto"
  /// trocar placement against the initial RCM position.
  void set_center(const Vec3& center) { center_ = center; }

  TrocarState state(double t) const {
    switch (kind_) {
      case Kind::Static:
        return {center_, Vec3::Zero()};
      case Kind::LinearOscillation: {
        const double omega = 2.0 * M_PI / period_;
        return {center_ + direction_ * (amplitude_ * std::sin(omega * t)),
                direction_ * (amplitude_ * omega * std::cos(omega * t))};
      }
      case Kind::CustomSamples: {
        if (t < samples_.front().first) {
          throw ConfigError("trocar sample lookup before first sample (t=" +
                            std::to_string(t) + ")");
        }
        if (t >= samples_.back().first) {
          return {samples_.back().second, Vec3::Zero()};
        }
        auto hi = std::upper_bound(
            samples_.begin(), samples_.end(), t,
            [](double tt, const auto& s) { return tt < s.first; });
        auto lo = hi - 1;
        const double span = hi->first - lo->first;
        const Vec3 slope = (hi->second - lo->second) / span;
        return {lo->second + slope * (t - lo->first), slope};
      }
    }
    throw std::logic_error("unreachable trocar kind");
  }

 private:
  TrocarTrajectory() = default;
  Kind kind_ = Kind::Static;
  Vec3 center_ = Vec3::Zero();
  Vec3 direction_ = Vec3::UnitX();
  double amplitude_ = 0.0;
  double period_ = 1.0;
  std::vector<std::pair<double, Vec3>> samples_;
};

inline TrocarState trocar_state(const TrocarTrajectory& traj, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("trocar_state: t must be >= 0");
  return traj.state(t);
}

/// Scheduled ground-truth force on the instrument wrist center. Intervals
/// are [t_start, t_end); overlapping entries sum.
struct ExternalLoad {
  struct Entry {
    double t_start = 0.0;
    double t_end = 0.0;
    Vec3 force = Vec3::Zero();
  };
  std::vector<Entry> schedule;
  bool enabled = true;

  Vec3 force_at(double t) const {
    Vec3 f = Vec3::Zero();
    if (!enabled) return f;
    for (const Entry& e : schedule) {
      if (t >= e.t_start && t < e.t_end) f += e.force;
    }
    return f;
  }
};

/// Spring-damper interaction force at the RCM:
/// K_env (x_trocar - x_rcm) + B_env (xd_trocar - xd_rcm).
inline Vec3 rcm_interaction_force(const EnvironmentModel& env,
                                  const Vec3& x_trocar, const Vec3& x_rcm,
                                  const Vec3& xdot_trocar,
                                  const Vec3& xdot_rcm) {
  return env.k_env.asDiagonal() * (x_trocar - x_rcm) +
         env.b_env.asDiagonal() * (xdot_trocar - xdot_rcm);
}

/// Zero-mean Gaussian measurement noise, per channel. Off by default.
struct NoiseSpec {
  double force_std = 0.0;   // N
  double moment_std = 0.0;  // N*m

  bool enabled() const { return force_std > 0.0 || moment_std > 0.0; }
};

/// Reaction wrench at the IDM base under static equilibrium of the loads
/// applied at the RCM (lever eta * d_ins) and at the instrument point
/// (lever d_ins). World-frame components.
inline Wrench synthesize_base_wrench(const Vec3& f_rcm, const Vec3& f_ins,
                                     const Vec3& d_ins, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument(
        "synthesize_base_wrench: eta must lie in (0,1)");
  }
  Wrench w;
  w.frame = Frame::World;
  w.force = -(f_rcm + f_ins);
  w.moment = -(eta * d_ins.cross(f_rcm) + d_ins.cross(f_ins));
  return w;
}

inline Wrench synthesize_base_wrench(const Vec3& f_rcm, const Vec3& f_ins,
                                     const Vec3& d_ins, double eta,
                                     const NoiseSpec& noise,
                                     std::mt19937_64& rng) {
  Wrench w = synthesize_base_wrench(f_rcm, f_ins, d_ins, eta);
  if (noise.enabled()) {
    std::normal_distribution<double> nf(0.0, noise.force_std);
    std::normal_distribution<double> nm(0.0, noise.moment_std);
    for (int i = 0; i < 3; ++i) {
      if (noise.force_std > 0.0) w.force[i] += nf(rng);
      if (noise.moment_std > 0.0) w.moment[i] += nm(rng);
    }
  }
  return w;
}

}  // namespace rcmsim
