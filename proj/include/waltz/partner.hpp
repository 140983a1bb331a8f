#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "waltz/types.hpp"

namespace waltz {

enum class PartnerMode { Compliant, Resistive, PushAway, Absent };

inline PartnerMode partner_mode_from_string(const std::string& s) {
  if (s == "compliant") return PartnerMode::Compliant;
  if (s == "resistive") return PartnerMode::Resistive;
  if (s == "push_away") return PartnerMode::PushAway;
  if (s == "absent") return PartnerMode::Absent;
  throw ConfigError("partner: unknown mode '" + s + "'");
}

inline std::string to_string(PartnerMode m) {
  switch (m) {
    case PartnerMode::Compliant: return "compliant";
    case PartnerMode::Resistive: return "resistive";
    case PartnerMode::PushAway: return "push_away";
    case PartnerMode::Absent: return "absent";
  }
  return "?";
}

/// Spring-damper hand model closing the force loop in place of a human
/// follower. Palm-on-palm contact transmits no moment, so moments are zero.
struct PartnerModel {
  PartnerMode mode = PartnerMode::Compliant;
  double stiffness = 150.0;     // N/m
  double damping = 20.0;        // N*s/m
  double lag = 0.3;             // s, first-order tracking lag
  double push_distance = 0.3;   // m, push-away target offset
  double push_onset = 5.0;      // s
  double noise_amplitude = 0.0; // N, uniform per-axis force noise
  std::uint64_t seed = 0;

  void validate() const {
    if (stiffness < 0 || damping < 0 || lag < 0)
      throw ConfigError("partner: stiffness, damping and lag must be >= 0");
    if (push_distance < 0 || push_onset < 0 || noise_amplitude < 0)
      throw ConfigError("partner: push and noise parameters must be >= 0");
  }
};

/// Virtual human-hand state for every robot hand, in the world frame.
struct PartnerState {
  struct Hand {
    Vec3 position{Vec3::Zero()};
    Vec3 velocity{Vec3::Zero()};
    Vec3 anchor{Vec3::Zero()};   // initial contact point (resistive target)
    Vec3 noise{Vec3::Zero()};    // force noise sample for the current tick
    bool pushing = false;
    Vec3 push_direction{Vec3::Zero()};
  };
  std::vector<Hand> hands;
  std::mt19937_64 rng;
};

/// Places the virtual hands at the robot hands (contact established) and
/// seeds the noise stream.
inline PartnerState init_partner(const PartnerModel& model,
                                 std::span<const Pose> robot_hands) {
  model.validate();
  PartnerState state;
  state.rng.seed(model.seed);
  state.hands.resize(robot_hands.size());
  for (std::size_t h = 0; h < robot_hands.size(); ++h) {
    state.hands[h].position = robot_hands[h].position;
    state.hands[h].anchor = robot_hands[h].position;
  }
  return state;
}

/// Advances the virtual hands one tick. Compliant hands relax toward the
/// robot hands with the configured lag; resistive hands hold their anchor;
/// push-away hands chase a point push_distance away from the robot hand
/// after the onset time. Deterministic for a fixed seed.
inline PartnerState step_partner(const PartnerModel& model, PartnerState state,
                                 std::span<const Pose> robot_hands, double dt,
                                 double t) {
  if (robot_hands.size() != state.hands.size())
    throw ConfigError("partner: hand count changed mid-trial");
  if (model.mode == PartnerMode::Absent) return state;

  const double alpha = model.lag <= 1e-12 ? 1.0 : -std::expm1(-dt / model.lag);
  for (std::size_t h = 0; h < state.hands.size(); ++h) {
    auto& hand = state.hands[h];
    Vec3 target = hand.anchor;
    switch (model.mode) {
      case PartnerMode::Compliant:
        target = robot_hands[h].position;
        break;
      case PartnerMode::Resistive:
        target = hand.anchor;
        break;
      case PartnerMode::PushAway: {
        if (t < model.push_onset) {
          target = robot_hands[h].position;
          break;
        }
        if (!hand.pushing) {
          hand.pushing = true;
          Vec3 dir = hand.position - robot_hands[h].position;
          if (dir.norm() < 1e-6)
            dir = Vec3(0.0, h == 0 ? 1.0 : -1.0, 0.0);  // outward from the hold
          hand.push_direction = dir.normalized();
        }
        target = robot_hands[h].position + model.push_distance * hand.push_direction;
        break;
      }
      case PartnerMode::Absent:
        break;
    }
    const Vec3 prev = hand.position;
    hand.position = prev + alpha * (target - prev);
    hand.velocity = dt > 0.0 ? Vec3((hand.position - prev) / dt) : Vec3::Zero();
    if (model.noise_amplitude > 0.0) {
      std::uniform_real_distribution<double> u(-model.noise_amplitude,
                                               model.noise_amplitude);
      hand.noise = Vec3(u(state.rng), u(state.rng), u(state.rng));
    }
  }
  return state;
}

/// Wrench the wrist F/T sensor of one hand would measure against the virtual
/// human hand. Zero in absent mode.
inline Wrench measured_wrench(const PartnerModel& model, const PartnerState& state,
                              std::size_t hand, const Pose& robot_hand,
                              const Twist& robot_vel) {
  if (model.mode == PartnerMode::Absent) return Wrench{};
  const auto& h = state.hands.at(hand);
  Wrench w;
  w.force = model.stiffness * (h.position - robot_hand.position) +
            model.damping * (h.velocity - robot_vel.linear) + h.noise;
  return w;
}

}  // namespace waltz
