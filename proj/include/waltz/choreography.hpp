#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "waltz/types.hpp"

namespace waltz {

enum class Foot { Left, Right };

inline std::size_t hand_for_foot(Foot f) { return f == Foot::Left ? 0 : 1; }

/// One step of the leader's repeating sequence. `displacement` is the foot
/// travel in the ground plane (x forward, y left), meters.
struct StepSpec {
  int index = 1;  // 1-based position within the cycle
  Foot foot = Foot::Left;
  Vec2 displacement{Vec2::Zero()};
  double duration = 1.0;  // s
};

enum class Signal { HW, HD, TR, SC, SD };

/// Scheduled utterance: text to speak and when, relative to the step onset
/// (negative = before the step).
struct Utterance {
  std::string text;
  double emit_offset = 0.0;
  int step_index = 0;
};

/// Which leading signals are active for a trial, plus their magnitudes.
/// An empty signal set is the no-signal (NS) condition.
struct LeadingSignalSchedule {
  std::set<Signal> signals;
  std::string label = "NS";
  double hw_force = 1.5;         // N
  double hd_offset = 0.05;       // m
  double tr_yaw = 0.2;           // rad
  double ramp_duration = 0.5;    // s, rise time of the triangular envelope
  double audio_lead_time = 0.3;  // s before step onset

  bool has(Signal s) const { return signals.count(s) > 0; }

  /// Parses a trial label such as "NS", "HW", "HW+HD+TR" or "SC+HW".
  /// Signal order in the label is free; NS excludes everything else.
  static LeadingSignalSchedule parse(const std::string& label) {
    if (label.empty()) throw ConfigError("schedule: empty trial label");
    LeadingSignalSchedule sched;
    sched.label = label;
    std::stringstream ss(label);
    std::string part;
    bool saw_ns = false;
    while (std::getline(ss, part, '+')) {
      // trim surrounding spaces
      const auto b = part.find_first_not_of(" \t");
      const auto e = part.find_last_not_of(" \t");
      if (b == std::string::npos) throw ConfigError("schedule: empty signal in '" + label + "'");
      part = part.substr(b, e - b + 1);
      if (part == "NS") saw_ns = true;
      else if (part == "HW") sched.signals.insert(Signal::HW);
      else if (part == "HD") sched.signals.insert(Signal::HD);
      else if (part == "TR") sched.signals.insert(Signal::TR);
      else if (part == "SC") sched.signals.insert(Signal::SC);
      else if (part == "SD") sched.signals.insert(Signal::SD);
      else throw ConfigError("schedule: unknown signal '" + part + "' in '" + label + "'");
    }
    if (saw_ns && !sched.signals.empty())
      throw ConfigError("schedule: NS excludes all other signals ('" + label + "')");
    if (sched.has(Signal::SC) && sched.has(Signal::SD))
      throw ConfigError("schedule: SC and SD cannot be combined ('" + label + "')");
    sched.validate();
    return sched;
  }

  void validate() const {
    if (hw_force < 0 || hd_offset < 0 || tr_yaw < 0)
      throw ConfigError("schedule: signal magnitudes must be >= 0");
    if (!(ramp_duration > 0) || audio_lead_time < 0)
      throw ConfigError("schedule: ramp_duration must be > 0 and audio_lead_time >= 0");
  }
};

/// Instantaneous signal outputs for one control tick.
struct SignalAction {
  std::array<Wrench, 2> applied{};
  std::array<std::array<bool, 6>, 2> applied_axes{};  // whole-step activity mask
  std::array<Vec3, 2> setpoint_offset{Vec3::Zero(), Vec3::Zero()};
  double torso_yaw_offset = 0.0;
  std::optional<Utterance> pending_utterance;
};

/// Triangular envelope: 0 at the step boundaries, 1 at t = ramp. The ramp
/// saturates at the step duration so mid-step peaks stay exact.
inline double triangular_envelope(double t, double duration, double ramp) {
  const double up = std::min(ramp, duration);
  if (t <= 0.0 || t >= duration) return 0.0;
  if (t < up) return t / up;
  if (duration == up) return 0.0;
  return (duration - t) / (duration - up);
}

/// Leader's 6-step box: forward, diagonal, close, then mirrored back.
/// Distances are per-config; the sequence closes exactly on itself.
inline std::vector<StepSpec> step_sequence(double forward_distance = 0.13,
                                           double lateral_distance = 0.145,
                                           double step_duration = 1.0) {
  if (!(forward_distance > 0) || !(lateral_distance > 0) || !(step_duration > 0))
    throw ConfigError("step_sequence: distances and duration must be > 0");
  const double f = forward_distance;
  const double l = lateral_distance;
  return {
      {1, Foot::Left, Vec2(f, 0.0), step_duration},    // forward
      {2, Foot::Right, Vec2(f, -l), step_duration},    // diagonal forward-right
      {3, Foot::Left, Vec2(0.0, -l), step_duration},   // close to the right
      {4, Foot::Right, Vec2(-f, 0.0), step_duration},  // backward
      {5, Foot::Left, Vec2(-f, l), step_duration},     // diagonal backward-left
      {6, Foot::Right, Vec2(0.0, l), step_duration},   // close to the left
  };
}

/// Follower-facing description of a leader step ("Step back" when the leader
/// advances, and so on).
inline std::string step_description(const StepSpec& step) {
  const bool fwd = step.displacement.x() > 1e-12;
  const bool back = step.displacement.x() < -1e-12;
  const bool lateral = std::abs(step.displacement.y()) > 1e-12;
  if (fwd && lateral) return "Step side";
  if (back && lateral) return "Step side";
  if (fwd) return "Step back";
  if (back) return "Step forward";
  if (lateral) return "Step close";
  return "Step in place";
}

/// Signal outputs at time t_in_step within the given step. HW and HD act on
/// the hand matching the stepping foot, along the step's ground-plane
/// direction; TR yaws the torso toward the stepping side.
inline SignalAction signal_actions(const LeadingSignalSchedule& sched, const StepSpec& step,
                                   double t_in_step) {
  if (t_in_step < 0.0 || t_in_step > step.duration)
    throw std::invalid_argument("signal_actions: t_in_step outside the step");
  SignalAction action;
  const double env = triangular_envelope(t_in_step, step.duration, sched.ramp_duration);
  const std::size_t hand = hand_for_foot(step.foot);
  const double dnorm = step.displacement.norm();
  const Vec3 dir = dnorm > 1e-12
                       ? Vec3(step.displacement.x() / dnorm, step.displacement.y() / dnorm, 0.0)
                       : Vec3::Zero();

  if (sched.has(Signal::HW)) {
    action.applied[hand].force = env * sched.hw_force * dir;
    for (int i = 0; i < 3; ++i)
      action.applied_axes[hand][static_cast<std::size_t>(i)] = std::abs(dir[i]) > 1e-12;
  }
  if (sched.has(Signal::HD)) action.setpoint_offset[hand] = env * sched.hd_offset * dir;
  if (sched.has(Signal::TR)) {
    const double sign = step.foot == Foot::Left ? 1.0 : -1.0;  // yaw toward stepping side
    action.torso_yaw_offset = sign * env * sched.tr_yaw;
  }
  if (sched.has(Signal::SC))
    action.pending_utterance =
        Utterance{std::to_string(step.index), -sched.audio_lead_time, step.index};
  if (sched.has(Signal::SD))
    action.pending_utterance =
        Utterance{step_description(step), -sched.audio_lead_time, step.index};
  return action;
}

/// Latching deflection watchdog. Once any hand's position error exceeds the
/// threshold the trial stays stopped.
struct StopMonitor {
  double threshold = 0.15;  // m, on the position error norm
  bool stopped = false;
  int hand = -1;
  double time = 0.0;
};

inline StopMonitor check_stop(StopMonitor monitor, std::span<const Vec6> pose_errors,
                              double t) {
  if (monitor.stopped) return monitor;
  for (std::size_t h = 0; h < pose_errors.size(); ++h) {
    if (pose_errors[h].head<3>().norm() > monitor.threshold) {
      monitor.stopped = true;
      monitor.hand = static_cast<int>(h);
      monitor.time = t;
      break;
    }
  }
  return monitor;
}

struct StepOnset {
  double t = 0.0;
  StepSpec step;
};

struct SpokenEvent {
  double t = 0.0;
  std::string text;
  int step_index = 0;
};

/// Advances the repeating step sequence against absolute time, emitting step
/// onsets, scheduled utterances and the kinematic base translation. Events in
/// a call to advance() cover the half-open window [t, t+dt). When stopped the
/// phase, base pose and pending audio freeze.
class StepSequencer {
public:
  /// `base_motion_scale` maps foot displacement to base translation; the body
  /// frame sits between alternating feet, so it travels half a foot step by
  /// default.
  StepSequencer(std::vector<StepSpec> sequence, LeadingSignalSchedule schedule,
                double base_motion_scale = 0.5)
      : seq_(std::move(sequence)), sched_(std::move(schedule)),
        base_scale_(base_motion_scale) {
    if (seq_.empty()) throw ConfigError("sequencer: empty step sequence");
    if (base_scale_ < 0.0) throw ConfigError("sequencer: base_motion_scale must be >= 0");
  }

  struct TickEvents {
    std::vector<StepOnset> onsets;
    std::vector<SpokenEvent> utterances;
  };

  const StepSpec& current_step() const { return seq_[pos_]; }

  /// Time within the current step, clamped to its duration.
  double phase() const {
    if (!started_) return 0.0;
    return std::clamp(t_ - current_onset_, 0.0, seq_[pos_].duration);
  }

  /// Base translation accumulated so far: completed steps plus the fraction
  /// of the current one, scaled from foot travel to body travel.
  Vec2 base_position() const {
    if (!started_) return base_scale_ * completed_;
    const double frac = std::clamp((t_ - current_onset_) / seq_[pos_].duration, 0.0, 1.0);
    return base_scale_ * Vec2(completed_ + frac * seq_[pos_].displacement);
  }

  int steps_emitted() const { return steps_emitted_; }
  bool started() const { return started_; }

  TickEvents advance(double dt, bool stopped) {
    TickEvents out;
    if (stopped) {
      pending_.reset();
      return out;
    }
    // events fire in [t, t+dt); the guard band keeps boundary events from
    // double-firing or slipping past the horizon under accumulated rounding
    const double t_end = t_ + dt - kBoundaryGuard;
    if (pending_ && pending_->t < t_end) {
      out.utterances.push_back(*pending_);
      pending_.reset();
    }
    while (next_onset_ < t_end) {
      if (started_) completed_ += seq_[pos_].displacement;
      pos_ = next_pos_;
      current_onset_ = next_onset_;
      started_ = true;
      ++steps_emitted_;
      out.onsets.push_back({current_onset_, seq_[pos_]});

      next_pos_ = (pos_ + 1) % seq_.size();
      next_onset_ = current_onset_ + seq_[pos_].duration;
      schedule_utterance();
      if (pending_ && pending_->t < t_end) {  // only reachable when lead ~ duration
        out.utterances.push_back(*pending_);
        pending_.reset();
      }
    }
    t_ += dt;
    return out;
  }

private:
  static constexpr double kBoundaryGuard = 1e-9;  // s, far below any tick

  void schedule_utterance() {
    if (!sched_.has(Signal::SC) && !sched_.has(Signal::SD)) return;
    const StepSpec& next = seq_[next_pos_];
    const SignalAction probe = signal_actions(sched_, next, 0.0);
    if (!probe.pending_utterance) return;
    pending_ = SpokenEvent{next_onset_ + probe.pending_utterance->emit_offset,
                           probe.pending_utterance->text, next.index};
  }

  std::vector<StepSpec> seq_;
  LeadingSignalSchedule sched_;
  double base_scale_ = 0.5;
  double t_ = 0.0;
  bool started_ = false;
  std::size_t pos_ = 0;
  std::size_t next_pos_ = 0;
  double current_onset_ = 0.0;
  double next_onset_ = 0.0;
  Vec2 completed_{Vec2::Zero()};
  int steps_emitted_ = 0;
  std::optional<SpokenEvent> pending_;
};

}  // namespace waltz
