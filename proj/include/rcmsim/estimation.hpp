#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcmsim/types.hpp"

namespace rcmsim {

/// Loading hypothesis for the single base-mounted F/T measurement.
enum class LoadCase { Inconclusive = 0, SingleRcm = 1, RcmPlusInstrument = 2 };

inline const char* to_string(LoadCase c) {
  switch (c) {
    case LoadCase::Inconclusive: return "inconclusive";
    case LoadCase::SingleRcm: return "single_rcm";
    case LoadCase::RcmPlusInstrument: return "rcm_plus_instrument";
  }
  return "?";
}

struct EstimatorParams {
  double epsilon_gamma = 0.05;   // |gamma_hat - eta| band for case 1
  double epsilon_f = 1e-3;       // N*m guard on the gamma denominator
  double prior_staleness = 0.5;  // s; case-2 prior refresh window
  double svd_cutoff = 1e-8;      // relative singular-value cutoff for pinv

  void validate() const {
    if (!(epsilon_gamma > 0.0)) {
      throw ConfigError("estimator.epsilon_gamma must be > 0");
    }
    if (!(epsilon_f > 0.0)) throw ConfigError("estimator.epsilon_f must be > 0");
    if (!(prior_staleness >= 0.0)) {
      throw ConfigError("estimator.prior_staleness must be >= 0");
    }
    if (!(svd_cutoff > 0.0 && svd_cutoff < 1.0)) {
      throw ConfigError("estimator.svd_cutoff must lie in (0,1)");
    }
  }
};

/// Moment-to-lever ratio locating a single applied force along the shaft:
/// |m_b| / |d_ins x f_b|. Empty when the denominator is below the guard
/// (zero or shaft-parallel force) - the criterion is then inconclusive.
inline std::optional<double> gamma_criterion(const Wrench& wrench,
                                             const Vec3& d_ins,
                                             double epsilon_f = 1e-3) {
  if (wrench.frame != Frame::World) {
    throw std::invalid_argument(
        "gamma_criterion: wrench must be expressed in the world frame");
  }
  const double denom = d_ins.cross(wrench.force).norm();
  if (denom < epsilon_f) return std::nullopt;
  return wrench.moment.norm() / denom;
}

/// Single force at the RCM iff gamma_hat falls within epsilon_gamma of eta.
inline LoadCase classify_case(std::optional<double> gamma_hat, double eta,
                              double epsilon_gamma) {
  if (!gamma_hat.has_value()) return LoadCase::Inconclusive;
  return (std::abs(*gamma_hat - eta) <= epsilon_gamma)
             ? LoadCase::SingleRcm
             : LoadCase::RcmPlusInstrument;
}

/// Case 1: all load at the RCM, so the applied force is just the negated
/// base reaction.
inline Vec3 estimate_case1(const Wrench& wrench) {
  if (wrench.frame != Frame::World) {
    throw std::invalid_argument(
        "estimate_case1: wrench must be expressed in the world frame");
  }
  return -wrench.force;
}

/// Equilibrium matrix coupling (f_ins, f_rcm) to the base wrench:
/// [[I, I], [skew(d_ins), eta * skew(d_ins)]]. Rank 5 for any nonzero
/// d_ins; the null space is spanned by (d_ins, -d_ins).
inline Mat6 build_gamma_matrix(const Vec3& d_ins, double eta) {
  if (!(d_ins.norm() > 0.0)) {
    throw GeometryError("build_gamma_matrix: d_ins has zero length");
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("build_gamma_matrix: eta must lie in (0,1)");
  }
  Mat6 gamma;
  gamma.topLeftCorner<3, 3>() = Mat3::Identity();
  gamma.topRightCorner<3, 3>() = Mat3::Identity();
  gamma.bottomLeftCorner<3, 3>() = skew(d_ins);
  gamma.bottomRightCorner<3, 3>() = eta * skew(d_ins);
  return gamma;
}

struct Case2Estimate {
  Vec3 f_ins_hat;
  Vec3 f_rcm_hat;
  Vec6 stacked;  // (f_ins_hat, f_rcm_hat)
};

/// Case 2: simultaneous loads at the RCM and the instrument point. The
/// equilibrium leaves one direction free; it is resolved toward the prior:
///   f_hat = Gamma^+ xi_b + (I - Gamma^+ Gamma) prior,  xi_b = (-f_b, -m_b).
/// The result is measurement-consistent and, along the null space, the
/// closest solution to the prior.
inline Case2Estimate estimate_case2(const Wrench& wrench, const Vec3& d_ins,
                                    double eta, const Vec6& prior,
                                    double svd_cutoff = 1e-8) {
  if (wrench.frame != Frame::World) {
    throw std::invalid_argument(
        "estimate_case2: wrench must be expressed in the world frame");
  }
  const Mat6 gamma = build_gamma_matrix(d_ins, eta);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      gamma, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double cutoff = svd_cutoff * sigma[0];
  int rank = 0;
  Eigen::VectorXd inv_sigma(6);
  Eigen::VectorXd range_mask(6);
  for (int i = 0; i < 6; ++i) {
    const bool keep = sigma[i] > cutoff;
    inv_sigma[i] = keep ? 1.0 / sigma[i] : 0.0;
    range_mask[i] = keep ? 1.0 : 0.0;
    rank += keep ? 1 : 0;
  }
  if (rank < 5) {
    throw GeometryError("estimate_case2: equilibrium matrix rank " +
                        std::to_string(rank) + " < 5; geometry degenerate");
  }

  Vec6 xi_b;
  xi_b << -wrench.force, -wrench.moment;

  const Eigen::MatrixXd v = svd.matrixV();
  const Vec6 particular =
      v * (inv_sigma.asDiagonal() * (svd.matrixU().transpose() * xi_b));
  const Mat6 null_projector =
      Mat6::Identity() - v * range_mask.asDiagonal() * v.transpose();

  Case2Estimate est;
  est.stacked = particular + null_projector * prior;
  est.f_ins_hat = est.stacked.head<3>();
  est.f_rcm_hat = est.stacked.tail<3>();
  return est;
}

/// Per-tick estimator memory.
struct EstimatorState {
  std::optional<double> gamma_hat;
  LoadCase load_case = LoadCase::Inconclusive;
  Vec3 f_rcm_hat = Vec3::Zero();
  Vec3 f_ins_hat = Vec3::Zero();
  Vec6 prior = Vec6::Zero();  // trusted (f_ins, f_rcm) stack
  bool prior_valid = false;
  double prior_age = 0.0;  // s since the prior was last refreshed
};

/// Stateful RCM force estimator advanced once per control tick. Case-1
/// ticks refresh the prior (high trust); in case 2 the prior is refreshed
/// after the staleness window; inconclusive ticks hold the previous output.
class Estimator {
 public:
  explicit Estimator(EstimatorParams params = {}) : params_(params) {
    params_.validate();
  }

  const EstimatorParams& params() const { return params_; }
  const EstimatorState& state() const { return state_; }

  const EstimatorState& update(const Wrench& wrench_world, const Vec3& d_ins,
                               double eta, double dt) {
    state_.gamma_hat = gamma_criterion(wrench_world, d_ins, params_.epsilon_f);
    state_.load_case =
        classify_case(state_.gamma_hat, eta, params_.epsilon_gamma);

    switch (state_.load_case) {
      case LoadCase::SingleRcm: {
        state_.f_rcm_hat = estimate_case1(wrench_world);
        state_.f_ins_hat = Vec3::Zero();
        state_.prior << state_.f_ins_hat, state_.f_rcm_hat;
        state_.prior_valid = true;
        state_.prior_age = 0.0;
        break;
      }
      case LoadCase::RcmPlusInstrument: {
        if (!state_.prior_valid) {
          warnings_.push_back(
              "case-2 estimate requested with no trusted prior; using zero");
          state_.prior.setZero();
          state_.prior_valid = true;
          state_.prior_age = 0.0;
        }
        const Case2Estimate est = estimate_case2(
            wrench_world, d_ins, eta, state_.prior, params_.svd_cutoff);
        state_.f_ins_hat = est.f_ins_hat;
        state_.f_rcm_hat = est.f_rcm_hat;
        state_.prior_age += dt;
        if (state_.prior_age > params_.prior_staleness) {
          state_.prior = est.stacked;
          state_.prior_age = 0.0;
        }
        break;
      }
      case LoadCase::Inconclusive:
        // Criterion says nothing usable; hold the previous estimates.
        state_.prior_age += dt;
        break;
    }
    return state_;
  }

  /// Accumulated non-fatal diagnostics; cleared by the caller.
  std::vector<std::string>& warnings() { return warnings_; }

 private:
  EstimatorParams params_;
  EstimatorState state_;
  std::vector<std::string> warnings_;
};

}  // namespace rcmsim
