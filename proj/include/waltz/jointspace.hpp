#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "waltz/model.hpp"
#include "waltz/types.hpp"

namespace waltz {

/// Joint-space gains. The admittance and blend vectors map virtual torque
/// (N*m) to commanded joint velocity (rad/s), so their units are rad/(s*N*m).
struct JointGains {
  JointVector kp;          // N*m/rad
  JointVector kd;          // N*m*s/rad
  JointVector admittance;  // velocity gain on the projected task torque
  JointVector blend_max;   // impedance blend ceiling (free motion)
  JointVector blend_min;   // impedance blend floor (hand contact)
  double blend_fade_duration = 0.5;  // s, full max<->min ramp

  void validate(std::size_t joint_count) const {
    const auto n = static_cast<Eigen::Index>(joint_count);
    if (kp.size() != n || kd.size() != n || admittance.size() != n ||
        blend_max.size() != n || blend_min.size() != n)
      throw ConfigError("joint gains: vector length does not match joint count");
    if (!kp.allFinite() || !kd.allFinite() || !admittance.allFinite() ||
        !blend_max.allFinite() || !blend_min.allFinite())
      throw ConfigError("joint gains: non-finite value");
    if ((kp.array() < 0).any() || (kd.array() < 0).any() || (admittance.array() < 0).any())
      throw ConfigError("joint gains: gains must be >= 0");
    if ((blend_min.array() < 0).any() || (blend_min.array() > blend_max.array()).any())
      throw ConfigError("joint gains: need 0 <= blend_min <= blend_max");
    if (!(blend_fade_duration > 0.0))
      throw ConfigError("joint gains: blend_fade_duration must be > 0");
  }
};

/// Mutable joint-space command state, owned by the control loop.
struct JointCommandState {
  JointVector q_c;    // commanded positions, always within limits
  JointVector blend;  // current per-joint impedance blend
};

/// Projects the per-hand task wrenches onto the joints: (1/n_h) * sum Ji^T Fi.
/// The 1/n_h normalization keeps wrenches coordinated between hands from
/// being applied twice.
inline JointVector project_wrenches(const KinematicModel& model, const JointVector& q,
                                    std::span<const Wrench> wrenches) {
  if (wrenches.size() != model.hand_count())
    throw ConfigError("project_wrenches: got " + std::to_string(wrenches.size()) +
                      " wrenches for " + std::to_string(model.hand_count()) + " hands");
  JointVector tau = model.zero();
  for (std::size_t h = 0; h < wrenches.size(); ++h)
    tau += jacobian(model, q, h).transpose() * wrenches[h].vector();
  return tau / static_cast<double>(model.hand_count());
}

inline JointVector joint_impedance(const JointGains& gains, const JointVector& q_err,
                                   const JointVector& qdot_err) {
  if (q_err.size() != qdot_err.size() || q_err.size() != gains.kp.size())
    throw ConfigError("joint_impedance: mismatched vector lengths");
  return -gains.kp.cwiseProduct(q_err) - gains.kd.cwiseProduct(qdot_err);
}

/// Ramps each joint's blend toward blend_min while any hand is over the wrench
/// threshold and back toward blend_max otherwise. Per-call slew is bounded by
/// (max - min) * dt / blend_fade_duration, with exact landing.
inline JointCommandState update_blend(const JointGains& gains, JointCommandState state,
                                      const std::vector<bool>& hand_over_threshold,
                                      double dt) {
  const bool contact =
      std::any_of(hand_over_threshold.begin(), hand_over_threshold.end(),
                  [](bool b) { return b; });
  for (Eigen::Index i = 0; i < state.blend.size(); ++i) {
    const double target = contact ? gains.blend_min[i] : gains.blend_max[i];
    const double step =
        (gains.blend_max[i] - gains.blend_min[i]) * dt / gains.blend_fade_duration;
    if (state.blend[i] < target)
      state.blend[i] = std::min(state.blend[i] + step, target);
    else if (state.blend[i] > target)
      state.blend[i] = std::max(state.blend[i] - step, target);
  }
  return state;
}

/// Velocity command from the two virtual torque channels.
inline JointVector command_velocity(const JointGains& gains, const JointCommandState& state,
                                    const JointVector& tau_admittance,
                                    const JointVector& tau_impedance) {
  return gains.admittance.cwiseProduct(tau_admittance) +
         state.blend.cwiseProduct(tau_impedance);
}

/// Integrates the velocity command into the position command, clamped to the
/// model's velocity and position limits. Returns the new state plus the
/// clamped velocity actually integrated.
inline std::pair<JointCommandState, JointVector> integrate_command(
    const KinematicModel& model, JointCommandState state, const JointVector& qdot_c,
    double dt) {
  auto [q_new, qd_clamped] = clamp_to_limits(model, state.q_c, qdot_c, dt);
  state.q_c = std::move(q_new);
  return {std::move(state), std::move(qd_clamped)};
}

}  // namespace waltz
