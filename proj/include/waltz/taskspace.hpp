#pragma once

#include <algorithm>
#include <array>

#include "waltz/types.hpp"

namespace waltz {

/// Task-space gains shared by both hands. All gain vectors are the diagonals
/// of the corresponding 6x6 matrices (linear axes first, angular last).
struct TaskGains {
  Vec6 admittance{Vec6::Ones()};   // dimensionless
  Vec6 stiffness{Vec6::Zero()};    // N/m, N*m/rad
  Vec6 damping{Vec6::Zero()};      // N*s/m, N*m*s/rad
  double force_threshold = 5.0;    // N, on the force norm
  double moment_threshold = 1.5;   // N*m, on the moment norm
  double fade_duration = 0.5;      // s, full 0<->1 gain ramp
  double velocity_filter_time = 0.02;  // s, low-pass on the damping velocity

  void validate() const {
    if (!admittance.allFinite() || !stiffness.allFinite() || !damping.allFinite())
      throw ConfigError("task gains: non-finite value");
    if ((admittance.array() < 0).any() || (stiffness.array() < 0).any() ||
        (damping.array() < 0).any())
      throw ConfigError("task gains: gains must be >= 0");
    if (!(force_threshold > 0.0) || !(moment_threshold > 0.0))
      throw ConfigError("task gains: wrench thresholds must be > 0");
    if (!(fade_duration > 0.0))
      throw ConfigError("task gains: fade_duration must be > 0");
    if (velocity_filter_time < 0.0)
      throw ConfigError("task gains: velocity_filter_time must be >= 0");
  }
};

/// Per-hand gain fading state. `lambda` scales the impedance gains as a whole
/// (contact gating); `mask` scales them per world axis while an applied wrench
/// is active on that axis. Both ramp linearly with slope 1/fade_duration.
struct FadeState {
  double lambda = 1.0;
  Vec6 mask = Vec6::Ones();
  double last_transition_time = 0.0;
  // ramp targets of the previous update, kept to timestamp target flips
  double lambda_target = 1.0;
  Vec6 mask_target = Vec6::Ones();
};

/// True when the measured wrench is at or above the gating threshold
/// (force and moment norms tested separately).
inline bool over_threshold(const TaskGains& gains, const Wrench& measured) {
  return measured.force.norm() >= gains.force_threshold ||
         measured.moment.norm() >= gains.moment_threshold;
}

inline Wrench admittance_wrench(const TaskGains& gains, const Wrench& measured) {
  return measured.scaled(gains.admittance);
}

/// Virtual spring-damper toward the hand setpoint, scaled by the fade state.
/// Exactly zero once lambda has faded to zero.
inline Wrench impedance_wrench(const TaskGains& gains, const FadeState& fade,
                               const Vec6& pose_err, const Twist& vel_err) {
  const Vec6 g = fade.lambda * fade.mask;
  const Vec6 f = -gains.stiffness.cwiseProduct(g).cwiseProduct(pose_err) -
                 gains.damping.cwiseProduct(g).cwiseProduct(vel_err.vector());
  return Wrench::from_vector(f);
}

/// Ramps lambda toward 0 while the measured wrench is over threshold and back
/// toward 1 otherwise; ramps each mask axis toward 0 while an applied wrench
/// is active on it. Per-call change magnitude is at most dt/fade_duration,
/// with exact landing on the target.
inline FadeState update_fade(const TaskGains& gains, FadeState fade,
                             const Wrench& measured,
                             const std::array<bool, 6>& applied_active_axes,
                             double dt, double t = 0.0) {
  const double step = dt / gains.fade_duration;
  const auto slew = [step](double value, double target) {
    if (value < target) return std::min(value + step, target);
    if (value > target) return std::max(value - step, target);
    return value;
  };

  const double lambda_target = over_threshold(gains, measured) ? 0.0 : 1.0;
  Vec6 mask_target;
  for (int i = 0; i < 6; ++i)
    mask_target[i] = applied_active_axes[static_cast<std::size_t>(i)] ? 0.0 : 1.0;

  if (lambda_target != fade.lambda_target || mask_target != fade.mask_target)
    fade.last_transition_time = t;
  fade.lambda_target = lambda_target;
  fade.mask_target = mask_target;

  fade.lambda = slew(fade.lambda, lambda_target);
  for (int i = 0; i < 6; ++i) fade.mask[i] = slew(fade.mask[i], mask_target[i]);
  return fade;
}

/// Total task-space wrench: admittance plus faded impedance plus the scheduled
/// applied wrench. The applied wrench passes through unmasked; the mask only
/// suppresses impedance on its axes.
inline Wrench task_wrench(const TaskGains& gains, const FadeState& fade,
                          const Wrench& measured, const Vec6& pose_err,
                          const Twist& vel_err, const Wrench& applied) {
  return admittance_wrench(gains, measured) +
         impedance_wrench(gains, fade, pose_err, vel_err) + applied;
}

}  // namespace waltz
