#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "waltz/choreography.hpp"
#include "waltz/config.hpp"
#include "waltz/control_loop.hpp"
#include "waltz/partner.hpp"

namespace waltz {

/// Per-hand slice of a tick record.
struct HandRecord {
  Wrench measured;
  Wrench applied;
  Wrench task;
  Pose pose;
  Pose setpoint;
  double lambda = 1.0;
};

/// One control tick. `q` is the executed position entering the tick; `q_c`
/// and `qd_c` are the commands it produced. Base and step reflect the
/// sequencer state after the tick's advance.
struct TickRecord {
  double t = 0.0;
  JointVector q;
  JointVector q_c;
  JointVector qd_c;
  std::vector<HandRecord> hands;
  JointVector blend;
  double torso_yaw_offset = 0.0;  // scheduled TR offset applied this tick
  int step_index = 0;
  Vec2 base{Vec2::Zero()};
  bool stopped = false;
};

struct TrialEvent {
  double t = 0.0;
  std::string kind;  // "step_onset" | "utterance" | "stop"
  int step_index = 0;
  std::string text;  // utterance text, stepping foot, or stopping hand
};

struct TrialLog {
  std::string label;
  std::uint64_t seed = 0;
  double timestep = 0.0;
  std::vector<TickRecord> records;
  std::vector<TrialEvent> events;
  // end-of-trial summary
  Vec2 final_base{Vec2::Zero()};
  int steps_emitted = 0;
  bool stopped = false;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Trial seed when the config leaves it unset. Depends only on the trial's
/// position in its block so reshuffling a block never changes trial content.
inline std::uint64_t derived_trial_seed(std::size_t original_index) {
  return splitmix64(0x77a1f5b3d2c4e697ULL ^ original_index);
}

/// Runs one trial: partner wrench -> task-space fade and wrench -> joint-space
/// projection, blend, command and integration -> step sequencing and stop
/// check -> log. Bit-deterministic for a fixed config and seed.
inline TrialLog run_trial(const TrialConfig& config) {
  config.validate();
  if (config.schedule.has(Signal::TR) && !config.model.has_joint("torso_yaw"))
    throw ConfigError("trial '" + config.label +
                      "': TR requires a torso_yaw joint in the model");

  const std::uint64_t seed = config.seed.value_or(derived_trial_seed(0));
  PartnerModel partner_model = config.partner;
  partner_model.seed = seed;

  ControlLoop loop(config.model, config.task_gains, config.joint_gains,
                   config.hold_posture);
  StepSequencer sequencer(config.steps.build(), config.schedule,
                          config.steps.base_motion_scale);
  StopMonitor monitor;
  monitor.threshold = config.stop_threshold;

  const std::size_t nh = config.model.hand_count();
  const double dt = config.timestep;
  const auto ticks = static_cast<std::size_t>(std::llround(config.duration / dt));
  if (ticks == 0)
    throw ConfigError("trial '" + config.label + "': duration shorter than one tick");

  // world-frame hand poses at contact
  std::vector<Pose> world_hands(nh);
  for (std::size_t h = 0; h < nh; ++h) world_hands[h] = loop.desired_pose(h);
  PartnerState partner = init_partner(partner_model, world_hands);

  TrialLog log;
  log.label = config.label;
  log.seed = seed;
  log.timestep = dt;
  log.records.reserve(ticks);

  Vec2 base = sequencer.base_position();
  std::vector<Vec3> prev_world_pos(nh);
  std::vector<Wrench> ft_state(nh);
  for (std::size_t h = 0; h < nh; ++h)
    prev_world_pos[h] = world_hands[h].position + Vec3(base.x(), base.y(), 0.0);

  for (std::size_t k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) * dt;

    // signals scheduled for the current step phase; silent once stopped
    SignalAction action;
    if (!monitor.stopped)
      action = signal_actions(config.schedule, sequencer.current_step(), sequencer.phase());

    // hand state in the world frame (base translates during steps);
    // velocities by finite difference of the world positions
    std::vector<Pose> hands_world(nh);
    std::vector<Twist> vels_world(nh);
    for (std::size_t h = 0; h < nh; ++h) {
      hands_world[h] = forward_kinematics(loop.model(), loop.q(), h);
      hands_world[h].position += Vec3(base.x(), base.y(), 0.0);
      vels_world[h].linear = (hands_world[h].position - prev_world_pos[h]) / dt;
      prev_world_pos[h] = hands_world[h].position;
    }

    partner = step_partner(partner_model, std::move(partner), hands_world, dt, t);

    ControlLoop::Input in;
    in.measured.resize(nh);
    in.applied.resize(nh);
    in.applied_axes.resize(nh);
    in.setpoint_offset.resize(nh);
    for (std::size_t h = 0; h < nh; ++h) {
      const Wrench raw =
          measured_wrench(partner_model, partner, h, hands_world[h], vels_world[h]);
      // wrist F/T pipeline low-pass; the controller sees the sensor output
      const double alpha = dt / (config.ft_filter_time + dt);
      ft_state[h].force += alpha * (raw.force - ft_state[h].force);
      ft_state[h].moment += alpha * (raw.moment - ft_state[h].moment);
      in.measured[h] = ft_state[h];
      in.applied[h] = action.applied[h];
      in.applied_axes[h] = action.applied_axes[h];
      in.setpoint_offset[h] = action.setpoint_offset[h];
    }
    in.torso_yaw_offset = action.torso_yaw_offset;

    ControlLoop::Output out = loop.tick(in, dt, t);

    const bool was_stopped = monitor.stopped;
    monitor = check_stop(monitor, out.pose_error, t);
    if (monitor.stopped && !was_stopped) {
      log.events.push_back({monitor.time, "stop", sequencer.current_step().index,
                            loop.model().hands()[static_cast<std::size_t>(monitor.hand)].name});
    }

    const StepSequencer::TickEvents ev = sequencer.advance(dt, monitor.stopped);
    for (const StepOnset& onset : ev.onsets)
      log.events.push_back({onset.t, "step_onset", onset.step.index,
                            onset.step.foot == Foot::Left ? "left" : "right"});
    for (const SpokenEvent& u : ev.utterances)
      log.events.push_back({u.t, "utterance", u.step_index, u.text});

    base = sequencer.base_position();

    TickRecord rec;
    rec.t = t;
    rec.q = out.q;
    rec.q_c = out.q_c;
    rec.qd_c = out.qd_c;
    rec.blend = out.blend;
    rec.torso_yaw_offset = action.torso_yaw_offset;
    rec.step_index = sequencer.current_step().index;
    rec.base = base;
    rec.stopped = monitor.stopped;
    rec.hands.resize(nh);
    for (std::size_t h = 0; h < nh; ++h) {
      rec.hands[h].measured = in.measured[h];
      rec.hands[h].applied = in.applied[h];
      rec.hands[h].task = out.task[h];
      rec.hands[h].pose = out.hand_pose[h];
      rec.hands[h].setpoint = out.setpoint[h];
      rec.hands[h].lambda = out.lambda[h];
    }
    log.records.push_back(std::move(rec));
  }

  log.final_base = sequencer.base_position();
  log.steps_emitted = sequencer.steps_emitted();
  log.stopped = monitor.stopped;
  return log;
}

struct BlockResult {
  std::string name;
  std::vector<std::size_t> order;  // realized order: original index of each run
  std::vector<TrialLog> logs;      // in realized order
};

/// Runs the trials of one block in an order shuffled from the seed.
/// Trial content is independent of the block seed: unseeded trials derive
/// their seed from their original position in the list.
inline BlockResult run_block(const std::vector<TrialConfig>& configs, std::uint64_t seed,
                             const std::string& name = "block") {
  if (configs.empty()) throw ConfigError("run_block: empty trial list");

  BlockResult result;
  result.name = name;
  result.order.resize(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) result.order[i] = i;

  // Fisher-Yates with an explicit generator so the order is reproducible
  // across platforms.
  std::uint64_t state = seed;
  for (std::size_t i = configs.size() - 1; i > 0; --i) {
    state = splitmix64(state);
    const std::size_t j = static_cast<std::size_t>(state % (i + 1));
    std::swap(result.order[i], result.order[j]);
  }

  for (std::size_t original : result.order) {
    TrialConfig cfg = configs[original];
    if (!cfg.seed) cfg.seed = derived_trial_seed(original);
    try {
      result.logs.push_back(run_trial(cfg));
    } catch (const std::exception& e) {
      throw ConfigError("trial '" + cfg.label + "' (block position " +
                        std::to_string(original) + "): " + e.what());
    }
  }
  return result;
}

}  // namespace waltz
