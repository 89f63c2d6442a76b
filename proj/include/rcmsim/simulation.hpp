#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcmsim/builtin_models.hpp"
#include "rcmsim/control.hpp"
#include "rcmsim/environment.hpp"
#include "rcmsim/estimation.hpp"
#include "rcmsim/manipulator.hpp"
#include "rcmsim/rcm.hpp"

namespace rcmsim {

/// Commanded instrument-point path. Positions that default to "wherever the
/// instrument starts" are resolved once against the initial kinematics.
class DesiredTrajectory {
 public:
  enum class Kind { Hold, Line, Circle, Waypoints };

  static DesiredTrajectory hold(std::optional<Vec3> point = std::nullopt) {
    DesiredTrajectory d;
    d.kind_ = Kind::Hold;
    d.point_ = point;
    return d;
  }

  /// Straight segment traversed over travel_time seconds, then held.
  static DesiredTrajectory line(std::optional<Vec3> start, const Vec3& end,
                                double travel_time) {
    if (!(travel_time > 0.0)) {
      throw ConfigError("desired line travel_time must be > 0");
    }
    DesiredTrajectory d;
    d.kind_ = Kind::Line;
    d.point_ = start;
    d.end_ = end;
    d.travel_time_ = travel_time;
    return d;
  }

  /// Circle of the given radius and frequency in the plane perpendicular to
  /// `normal`. By default the circle passes through the initial instrument
  /// position, which becomes the phase origin.
  static DesiredTrajectory circle(double radius, double frequency,
                                  const Vec3& normal = Vec3::UnitZ(),
                                  std::optional<Vec3> center = std::nullopt) {
    if (!(radius > 0.0)) throw ConfigError("desired circle radius must be > 0");
    if (!(frequency > 0.0)) {
      throw ConfigError("desired circle frequency must be > 0");
    }
    if (!(normal.norm() > 0.0)) {
      throw ConfigError("desired circle normal must be nonzero");
    }
    DesiredTrajectory d;
    d.kind_ = Kind::Circle;
    d.radius_ = radius;
    d.frequency_ = frequency;
    d.normal_ = normal.normalized();
    d.point_ = center;
    return d;
  }

  static DesiredTrajectory waypoints(
      std::vector<std::pair<double, Vec3>> samples) {
    if (samples.empty()) {
      throw ConfigError("desired waypoints list is empty");
    }
    if (!std::is_sorted(samples.begin(), samples.end(),
                        [](const auto& a, const auto& b) {
                          return a.first < b.first;
                        })) {
      throw ConfigError("desired waypoints must be sorted by time");
    }
    DesiredTrajectory d;
    d.kind_ = Kind::Waypoints;
    d.samples_ = std::move(samples);
    return d;
  }

  Kind kind() const { return kind_; }

  /// Fills position defaults from the initial instrument position.
  void resolve(const Vec3& x_ins_initial) {
    switch (kind_) {
      case Kind::Hold:
        if (!point_) point_ = x_ins_initial;
        break;
      case Kind::Line:
        if (!point_) point_ = x_ins_initial;
        break;
      case Kind::Circle: {
        Vec3 u = Vec3::UnitX() - Vec3::UnitX().dot(normal_) * normal_;
        if (u.norm() < 1e-6) {
          u = Vec3::UnitY() - Vec3::UnitY().dot(normal_) * normal_;
        }
        u_ = u.normalized();
        v_ = normal_.cross(u_);
        if (!point_) point_ = x_ins_initial - radius_ * u_;
        break;
      }
      case Kind::Waypoints:
        break;
    }
    resolved_ = true;
  }

  Vec3 position(double t) const {
    if (!resolved_) {
      throw std::logic_error("DesiredTrajectory::position before resolve()");
    }
    switch (kind_) {
      case Kind::Hold:
        return *point_;
      case Kind::Line: {
        const double s = std::min(std::max(t / travel_time_, 0.0), 1.0);
        return *point_ + s * (end_ - *point_);
      }
      case Kind::Circle: {
        const double phi = 2.0 * M_PI * frequency_ * t;
        return *point_ + radius_ * (std::cos(phi) * u_ + std::sin(phi) * v_);
      }
      case Kind::Waypoints: {
        if (t <= samples_.front().first) return samples_.front().second;
        if (t >= samples_.back().first) return samples_.back().second;
        auto hi = std::upper_bound(
            samples_.begin(), samples_.end(), t,
            [](double tt, const auto& s) { return tt < s.first; });
        auto lo = hi - 1;
        const double s = (t - lo->first) / (hi->first - lo->first);
        return lo->second + s * (hi->second - lo->second);
      }
    }
    throw std::logic_error("unreachable trajectory kind");
  }

 private:
  DesiredTrajectory() = default;
  Kind kind_ = Kind::Hold;
  std::optional<Vec3> point_;  // hold point / line start / circle center
  Vec3 end_ = Vec3::Zero();
  double travel_time_ = 1.0;
  double radius_ = 0.02;
  double frequency_ = 0.1;
  Vec3 normal_ = Vec3::UnitZ();
  Vec3 u_ = Vec3::UnitX();
  Vec3 v_ = Vec3::UnitY();
  std::vector<std::pair<double, Vec3>> samples_;
  bool resolved_ = false;
};

/// Joint posture that points the instrument shaft straight down (generic and
/// iiwa-like chains alike: the pitch joints sum to pi).
inline JointVector instrument_down_posture() {
  JointVector q;
  q << 0.0, 1.2, 0.0, 1.2, 0.0, M_PI - 2.4, 0.0;
  return q;
}

/// Everything a run needs. Trocar trajectories may be anchored "auto": the
/// reference point is placed at the initial RCM position plus an offset, so
/// scenarios stay well-posed for any robot model.
struct ScenarioConfig {
  std::string name = "scenario";
  ManipulatorModel robot = generic_7dof();
  JointVector initial_q = instrument_down_posture();
  double initial_eta = 0.25;
  GainSet gains;
  EnvironmentModel environment;
  NoiseSpec noise;
  EstimatorParams estimator;
  TrocarTrajectory trocar = TrocarTrajectory::static_point(Vec3::Zero());
  bool trocar_auto_center = true;
  Vec3 trocar_auto_offset = Vec3::Zero();
  ExternalLoad loads;
  DesiredTrajectory desired = DesiredTrajectory::hold();
  Vec3 f_rcm_desired = Vec3::Zero();
  double dt = 1e-3;
  double duration = 10.0;
  std::uint64_t seed = 0;
  double capture_distance = 0.05;
};

/// One logged step. gamma_hat is NaN while the criterion is inconclusive.
struct SimRecord {
  double t = 0.0;
  JointVector q = JointVector::Zero();
  double eta = 0.0;
  Vec3 x_ee = Vec3::Zero();
  Vec3 x_ins = Vec3::Zero();
  Vec3 x_rcm = Vec3::Zero();
  Vec3 x_trocar = Vec3::Zero();
  Vec3 x_des = Vec3::Zero();
  Vec3 f_rcm_true = Vec3::Zero();
  Vec3 f_ins_true = Vec3::Zero();
  Vec3 f_rcm_hat = Vec3::Zero();
  Vec3 f_ins_hat = Vec3::Zero();
  double gamma_hat = std::numeric_limits<double>::quiet_NaN();
  LoadCase load_case = LoadCase::Inconclusive;
  double e_rcm = 0.0;  // ||x_trocar - x_rcm||
  double e_ins = 0.0;  // ||x_des - x_ins||
  JointVector q_dot = JointVector::Zero();
  double eta_dot = 0.0;
  Wrench wrench_measured;
};

struct SimLog {
  std::string name;
  double dt = 0.0;
  std::vector<SimRecord> records;
  std::vector<std::string> warnings;
};

/// Per-tick internals exposed to tests and diagnostics.
struct StepDebug {
  double t;
  Jacobian6x8 j_total;
  Vec6 x_dot_cmd;
  ExtendedVector w;
  RedundancySolution solution;  // before rate saturation
};

/// Deterministic fixed-step closed-loop simulator. The controller sees only
/// the estimated RCM force; trocar position and velocity feed the
/// environment truth model alone.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig cfg)
      : cfg_(std::move(cfg)), rng_(cfg_.seed) {
    cfg_.gains.validate();
    cfg_.environment.validate();
    cfg_.estimator.validate();
    if (!(cfg_.dt > 0.0 && cfg_.dt <= 0.01)) {
      throw ConfigError("dt must lie in (0, 0.01] s");
    }
    if (!(cfg_.duration > 0.0)) throw ConfigError("duration must be > 0");
    if (!(cfg_.initial_eta > 0.0 && cfg_.initial_eta < 1.0)) {
      throw ConfigError("initial_eta must lie in (0,1)");
    }

    const KinematicsSample kin =
        compute_kinematics(cfg_.robot, cfg_.initial_q);
    const RcmGeometry geom = make_rcm_geometry(
        kin.pose_ee.position, kin.pose_ins.position, cfg_.initial_eta);
    if (cfg_.trocar_auto_center) {
      if (cfg_.trocar.kind() == TrocarTrajectory::Kind::CustomSamples) {
        throw ConfigError("auto trocar placement is not defined for "
                          "custom_samples trajectories");
      }
      cfg_.trocar.set_center(geom.x_rcm + cfg_.trocar_auto_offset);
    }
    cfg_.desired.resolve(geom.x_ins);

    const Vec3 trocar0 = cfg_.trocar.state(0.0).position;
    const double gap = (trocar0 - geom.x_rcm).norm();
    if (gap > cfg_.capture_distance) {
      throw SimulationError(
          0.0, "scenario is ill-posed: initial RCM is " + std::to_string(gap) +
                   " m from the trocar (capture_distance " +
                   std::to_string(cfg_.capture_distance) + " m)");
    }
  }

  const ScenarioConfig& config() const { return cfg_; }

  struct StepResult {
    ExtendedState next;
    ExtendedVector rates = ExtendedVector::Zero();
    SimRecord record;
  };

  /// Executes exactly one control tick at time t: kinematics, environment
  /// truth, sensor synthesis, estimation, command, redundancy solve, and
  /// explicit-Euler integration. prev_rates is the commanded (q_dot,
  /// eta_dot) of the previous tick, which defines the current RCM velocity
  /// seen by the damping term.
  StepResult step(const ExtendedState& state, const ExtendedVector& prev_rates,
                  Estimator& estimator, double t) {
    try {
      return step_impl(state, prev_rates, estimator, t);
    } catch (const SimulationError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationError(t, e.what());
    }
  }

  SimLog run() {
    SimLog log;
    log.name = cfg_.name;
    log.dt = cfg_.dt;
    const auto steps = static_cast<std::size_t>(
        std::llround(cfg_.duration / cfg_.dt));
    log.records.reserve(steps);

    ExtendedState state{cfg_.initial_q, cfg_.initial_eta};
    ExtendedVector rates = ExtendedVector::Zero();
    Estimator estimator(cfg_.estimator);

    for (std::size_t k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * cfg_.dt;
      StepResult r = step(state, rates, estimator, t);
      log.records.push_back(std::move(r.record));
      state = r.next;
      rates = r.rates;
      for (const std::string& w : estimator.warnings()) {
        warn("estimator", "t=" + std::to_string(t) + " s: " + w);
      }
      estimator.warnings().clear();
    }
    log.warnings = warnings_;
    return log;
  }

  /// Optional observer invoked once per tick with solver internals.
  std::function<void(const StepDebug&)> debug_observer;

 private:
  StepResult step_impl(const ExtendedState& state,
                       const ExtendedVector& prev_rates, Estimator& estimator,
                       double t) {
    const KinematicsSample kin = compute_kinematics(cfg_.robot, state.q);
    if (!cfg_.robot.within_limits(state.q)) {
      warn("joint_limits",
           "t=" + std::to_string(t) + " s: joint position outside limits");
    }
    const RcmGeometry geom = make_rcm_geometry(
        kin.pose_ee.position, kin.pose_ins.position, state.eta);
    const Jacobian3x8 j_rcm = jacobian_rcm(kin.jacobian_ee, kin.jacobian_ins,
                                           geom.d_ins, state.eta);

    const TrocarState troc = cfg_.trocar.state(t);
    const Vec3 xdot_rcm = j_rcm * prev_rates;
    const Vec3 f_rcm_true = rcm_interaction_force(
        cfg_.environment, troc.position, geom.x_rcm, troc.velocity, xdot_rcm);
    const Vec3 f_ins_true = cfg_.loads.force_at(t);

    const Wrench wrench_world = synthesize_base_wrench(
        f_rcm_true, f_ins_true, geom.d_ins, state.eta, cfg_.noise, rng_);
    // The sensor reports in its own frame (taken coincident with the
    // end-effector frame); the estimator works in world coordinates using
    // the rotation known from forward kinematics.
    const Wrench wrench_measured =
        expressed_in_sensor(wrench_world, kin.pose_ee.orientation);
    const Wrench wrench_for_estimation =
        expressed_in_world(wrench_measured, kin.pose_ee.orientation);

    const EstimatorState& est = estimator.update(
        wrench_for_estimation, geom.d_ins, state.eta, cfg_.dt);

    const Vec3 x_des = cfg_.desired.position(t);
    const Vec3 e_pos = x_des - geom.x_ins;
    const Vec3 f_err = est.f_rcm_hat - cfg_.f_rcm_desired;
    const Vec6 x_dot_cmd = build_command(e_pos, f_err, cfg_.gains, geom.d_ins);

    const Jacobian6x8 j_total = total_jacobian(kin.jacobian_ins, j_rcm);
    const ExtendedVector w = null_space_gradient(state.eta, cfg_.gains.eta0);
    const RedundancySolution sol = solve_redundancy(
        j_total, x_dot_cmd, w, cfg_.gains.lambda_dls, cfg_.gains.w_gain);
    if (debug_observer) {
      debug_observer(StepDebug{t, j_total, x_dot_cmd, w, sol});
    }

    JointVector q_dot = sol.q_dot;
    double eta_dot = sol.eta_dot;
    if (saturate_rates(q_dot, eta_dot, cfg_.gains.qdot_limit)) {
      warn("rate_limit",
           "t=" + std::to_string(t) + " s: joint rate saturated");
    }

    StepResult out;
    out.next.q = state.q + q_dot * cfg_.dt;
    out.next.eta = state.eta + eta_dot * cfg_.dt;
    if (out.next.eta < 0.02 || out.next.eta > 0.98) {
      out.next.eta = std::clamp(out.next.eta, 0.02, 0.98);
      warn("eta_clamp",
           "t=" + std::to_string(t) + " s: eta clamped to [0.02, 0.98]");
    }
    out.rates << q_dot, eta_dot;

    SimRecord& rec = out.record;
    rec.t = t;
    rec.q = state.q;
    rec.eta = state.eta;
    rec.x_ee = kin.pose_ee.position;
    rec.x_ins = geom.x_ins;
    rec.x_rcm = geom.x_rcm;
    rec.x_trocar = troc.position;
    rec.x_des = x_des;
    rec.f_rcm_true = f_rcm_true;
    rec.f_ins_true = f_ins_true;
    rec.f_rcm_hat = est.f_rcm_hat;
    rec.f_ins_hat = est.f_ins_hat;
    rec.gamma_hat = est.gamma_hat.value_or(
        std::numeric_limits<double>::quiet_NaN());
    rec.load_case = est.load_case;
    rec.e_rcm = (troc.position - geom.x_rcm).norm();
    rec.e_ins = (x_des - geom.x_ins).norm();
    rec.q_dot = q_dot;
    rec.eta_dot = eta_dot;
    rec.wrench_measured = wrench_measured;
    return out;
  }

  void warn(const std::string& kind, const std::string& message) {
    // First occurrence of each kind is recorded; repeats only counted.
    for (auto& [k, n] : warning_counts_) {
      if (k == kind) {
        ++n;
        return;
      }
    }
    warning_counts_.emplace_back(kind, 1);
    warnings_.push_back(message);
  }

  ScenarioConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<std::string> warnings_;
  std::vector<std::pair<std::string, std::size_t>> warning_counts_;
};

inline SimLog run_scenario(const ScenarioConfig& cfg) {
  return Simulation(cfg).run();
}

}  // namespace rcmsim
