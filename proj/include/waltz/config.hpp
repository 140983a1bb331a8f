#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "waltz/choreography.hpp"
#include "waltz/jointspace.hpp"
#include "waltz/model.hpp"
#include "waltz/partner.hpp"
#include "waltz/taskspace.hpp"

namespace waltz {

using nlohmann::json;

// ---------------------------------------------------------------------------
// built-in defaults
// ---------------------------------------------------------------------------

/// Upper body of a human-size humanoid: 2 torso joints plus 7 joints per arm,
/// palms as end effectors. Segment lengths are plausible approximations for a
/// 1.65 m robot; geometry is fully overridable through the model file.
inline KinematicModel default_model() {
  const double torso_lift = 0.25, torso_link = 0.15;
  const double shoulder_lat = 0.25, shoulder_up = 0.20;
  const double upper_arm = 0.27, forearm = 0.25, palm = 0.10;

  std::vector<JointDef> joints;
  joints.push_back({"torso_yaw", "base", Vec3::UnitZ(), Vec3(0, 0, torso_lift), -1.25, 1.25, 1.5});
  joints.push_back({"torso_pitch", "torso_yaw", Vec3::UnitY(), Vec3(0, 0, torso_link), -0.30, 0.70, 1.5});

  const auto arm = [&](const std::string& prefix, double side) {
    joints.push_back({prefix + "_shoulder_pitch", "torso_pitch", Vec3::UnitY(),
                      Vec3(0, side * shoulder_lat, shoulder_up), -2.60, 1.60, 2.5});
    joints.push_back({prefix + "_shoulder_roll", prefix + "_shoulder_pitch", Vec3::UnitX(),
                      Vec3::Zero(), side > 0 ? -0.30 : -2.20, side > 0 ? 2.20 : 0.30, 2.5});
    joints.push_back({prefix + "_shoulder_yaw", prefix + "_shoulder_roll", Vec3::UnitZ(),
                      Vec3::Zero(), -2.00, 2.00, 2.5});
    joints.push_back({prefix + "_elbow", prefix + "_shoulder_yaw", Vec3::UnitY(),
                      Vec3(0, 0, -upper_arm), -2.30, 0.05, 2.5});
    joints.push_back({prefix + "_wrist_yaw", prefix + "_elbow", Vec3::UnitZ(),
                      Vec3(0, 0, -forearm), -1.90, 1.90, 3.0});
    joints.push_back({prefix + "_wrist_pitch", prefix + "_wrist_yaw", Vec3::UnitY(),
                      Vec3::Zero(), -1.35, 1.35, 3.0});
    joints.push_back({prefix + "_wrist_roll", prefix + "_wrist_pitch", Vec3::UnitX(),
                      Vec3::Zero(), -2.00, 2.00, 3.0});
  };
  arm("l", +1.0);
  arm("r", -1.0);

  std::vector<HandFrame> hands;
  hands.push_back({"left_palm", "l_wrist_roll", Vec3(0, 0, -palm)});
  hands.push_back({"right_palm", "r_wrist_roll", Vec3(0, 0, -palm)});
  return KinematicModel::create(std::move(joints), std::move(hands));
}

/// Open-position hold: upper arms pitched forward, elbows flexed, palms
/// meeting the partner's hands in front of the chest.
inline JointVector default_hold_posture(const KinematicModel& model) {
  JointVector q = model.zero();
  const auto set = [&](const std::string& name, double v) {
    if (model.has_joint(name)) q[static_cast<Eigen::Index>(model.joint_index(name))] = v;
  };
  for (const std::string side : {"l", "r"}) {
    const double mirror = side == "l" ? 1.0 : -1.0;
    set(side + "_shoulder_pitch", -0.50);
    set(side + "_shoulder_roll", mirror * 0.15);
    set(side + "_elbow", -1.30);
    set(side + "_wrist_pitch", -0.25);
  }
  return q;
}

// Gain scale: at the hold posture J*J^T of either hand has linear-block
// eigenvalues of 0.07..0.55 and angular up to ~4.0, so with the identity
// joint admittance a hand force of F Newton drifts the hand at roughly
// 0.28*G_T*F m/s along the strong directions. The stiffness below puts the
// hand restoring rate at ~10/s even along the weakest direction while every
// delayed velocity feedback stays under unity at a 5 ms tick.
inline TaskGains default_task_gains() {
  TaskGains g;
  g.admittance = (Vec6() << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5).finished();
  g.stiffness = (Vec6() << 300, 300, 300, 5, 5, 5).finished();
  g.damping = (Vec6() << 2, 2, 2, 0.2, 0.2, 0.2).finished();
  g.force_threshold = 5.0;
  g.moment_threshold = 1.5;
  g.fade_duration = 0.5;
  return g;
}

/// Joints shared by every hand chain (the torso of the default model).
inline std::set<std::size_t> shared_chain_joints(const KinematicModel& model) {
  std::set<std::size_t> shared(model.chain(0).begin(), model.chain(0).end());
  for (std::size_t h = 1; h < model.hand_count(); ++h) {
    std::set<std::size_t> next;
    for (std::size_t j : model.chain(h))
      if (shared.count(j)) next.insert(j);
    shared = std::move(next);
  }
  return shared;
}

// The joint-space posture loop runs an order of magnitude slower than the
// task-space hand loop so setpoint offsets and torso cues are not fought by
// the posture spring.
inline JointGains default_joint_gains(const KinematicModel& model) {
  const auto n = static_cast<Eigen::Index>(model.joint_count());
  JointGains g;
  g.kp = JointVector::Constant(n, 1.0);
  g.kd = JointVector::Constant(n, 0.2);
  g.admittance = JointVector::Constant(n, 1.0);
  g.blend_max = JointVector::Constant(n, 1.0);
  g.blend_min = JointVector::Zero(n);
  for (std::size_t j : shared_chain_joints(model))
    g.blend_min[static_cast<Eigen::Index>(j)] = 0.6;
  g.blend_fade_duration = 0.5;
  return g;
}

// ---------------------------------------------------------------------------
// json helpers
// ---------------------------------------------------------------------------

namespace detail {

inline Vec3 vec3_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(where + ": expected an array of 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline Vec6 vec6_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return Vec6::Constant(j.get<double>());
  if (j.is_array() && j.size() == 2)  // [linear, angular] shorthand
    return (Vec6() << Vec3::Constant(j[0].get<double>()),
            Vec3::Constant(j[1].get<double>())).finished();
  if (j.is_array() && j.size() == 6) {
    Vec6 v;
    for (int i = 0; i < 6; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
    return v;
  }
  throw ConfigError(where + ": expected a number, [linear, angular] or 6 numbers");
}

/// Per-joint vector: a number applies uniformly; an object maps joint names
/// to values with an optional "default" entry; an array lists every joint.
inline JointVector joint_vector_from_json(const json& j, const KinematicModel& model,
                                          const std::string& where) {
  const auto n = static_cast<Eigen::Index>(model.joint_count());
  if (j.is_number()) return JointVector::Constant(n, j.get<double>());
  if (j.is_array()) {
    if (j.size() != model.joint_count())
      throw ConfigError(where + ": array length does not match joint count");
    JointVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
    return v;
  }
  if (j.is_object()) {
    double def = 0.0;
    if (j.contains("default")) def = j.at("default").get<double>();
    JointVector v = JointVector::Constant(n, def);
    for (const auto& [key, value] : j.items()) {
      if (key == "default") continue;
      v[static_cast<Eigen::Index>(model.joint_index(key))] = value.get<double>();
    }
    return v;
  }
  throw ConfigError(where + ": expected a number, array or object");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// model file
// ---------------------------------------------------------------------------

inline KinematicModel model_from_json(const json& j) {
  if (!j.contains("joints") || !j.contains("hands"))
    throw ConfigError("model file: 'joints' and 'hands' sections are required");
  std::vector<JointDef> joints;
  for (const auto& item : j.at("joints")) {
    JointDef d;
    d.name = item.at("name").get<std::string>();
    d.parent = item.at("parent").get<std::string>();
    d.axis = detail::vec3_from_json(item.at("axis"), "joint '" + d.name + "' axis");
    d.offset = detail::vec3_from_json(item.at("offset"), "joint '" + d.name + "' offset");
    const auto& lim = item.at("limits");
    if (!lim.is_array() || lim.size() != 2)
      throw ConfigError("joint '" + d.name + "': limits must be [min, max]");
    d.pos_min = lim[0].get<double>();
    d.pos_max = lim[1].get<double>();
    d.vel_limit = item.at("velocity_limit").get<double>();
    joints.push_back(std::move(d));
  }
  std::vector<HandFrame> hands;
  for (const auto& item : j.at("hands")) {
    HandFrame f;
    f.name = item.at("name").get<std::string>();
    f.parent = item.at("parent").get<std::string>();
    f.offset = detail::vec3_from_json(item.at("offset"), "hand '" + f.name + "' offset");
    hands.push_back(std::move(f));
  }
  return KinematicModel::create(std::move(joints), std::move(hands),
                                j.value("base_frame", std::string("base")));
}

inline JointVector hold_posture_from_json(const json& j, const KinematicModel& model) {
  if (!j.contains("hold_posture")) return default_hold_posture(model);
  return detail::joint_vector_from_json(j.at("hold_posture"), model, "hold_posture");
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error in '" + path + "': " + e.what());
  }
  return j;
}

// ---------------------------------------------------------------------------
// trial configuration
// ---------------------------------------------------------------------------

struct StepConfig {
  double forward_distance = 0.13;   // m
  double lateral_distance = 0.145;  // m
  double step_duration = 1.0;       // s
  double base_motion_scale = 0.5;   // base travel per unit foot travel
  std::vector<StepSpec> sequence;   // empty = default box

  std::vector<StepSpec> build() const {
    if (!sequence.empty()) return sequence;
    return step_sequence(forward_distance, lateral_distance, step_duration);
  }
};

struct TrialConfig {
  std::string label = "NS";
  LeadingSignalSchedule schedule = LeadingSignalSchedule::parse("NS");
  KinematicModel model = default_model();
  std::string model_file;  // empty = built-in default
  JointVector hold_posture = default_hold_posture(model);
  TaskGains task_gains = default_task_gains();
  JointGains joint_gains = default_joint_gains(model);
  StepConfig steps;
  PartnerModel partner;
  double stop_threshold = 0.15;    // m
  double ft_filter_time = 0.05;    // s, wrist F/T low-pass; 0 = raw
  double duration = 30.0;          // s
  double timestep = 0.005;         // s
  std::optional<std::uint64_t> seed;
  std::string output_path;

  void validate() const {
    if (!(duration > 0.0) || !(timestep > 0.0))
      throw ConfigError("trial '" + label + "': duration and timestep must be > 0");
    if (timestep > 0.02)
      throw ConfigError("trial '" + label + "': timestep must be <= 0.02 s");
    if (!(stop_threshold > 0.0))
      throw ConfigError("trial '" + label + "': stop_threshold must be > 0");
    if (ft_filter_time < 0.0)
      throw ConfigError("trial '" + label + "': ft_filter_time must be >= 0");
    if (model.hand_count() != 2)
      throw ConfigError("trial '" + label + "': trials need a two-hand model");
    model.check_joint_vector(hold_posture);
    task_gains.validate();
    joint_gains.validate(model.joint_count());
    schedule.validate();
    partner.validate();
    for (const StepSpec& step : steps.build()) {
      if (schedule.ramp_duration >= step.duration)
        throw ConfigError("trial '" + label +
                          "': ramp_duration must be shorter than every step");
      if (schedule.audio_lead_time >= step.duration)
        throw ConfigError("trial '" + label +
                          "': audio_lead_time must be shorter than every step");
    }
  }
};

inline Foot foot_from_string(const std::string& s) {
  if (s == "left") return Foot::Left;
  if (s == "right") return Foot::Right;
  throw ConfigError("steps: foot must be 'left' or 'right', got '" + s + "'");
}

inline TrialConfig trial_from_json(const json& j, const std::string& base_dir = "") {
  TrialConfig cfg;
  if (j.contains("label")) {
    cfg.label = j.at("label").get<std::string>();
    cfg.schedule = LeadingSignalSchedule::parse(cfg.label);
  }
  if (j.contains("model_file")) {
    cfg.model_file = j.at("model_file").get<std::string>();
    std::filesystem::path p(cfg.model_file);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    const json mj = load_json_file(p.string());
    cfg.model = model_from_json(mj);
    cfg.hold_posture = hold_posture_from_json(mj, cfg.model);
    cfg.task_gains = default_task_gains();
    cfg.joint_gains = default_joint_gains(cfg.model);
  } else if (j.contains("model")) {
    cfg.model = model_from_json(j.at("model"));
    cfg.hold_posture = hold_posture_from_json(j.at("model"), cfg.model);
    cfg.joint_gains = default_joint_gains(cfg.model);
  }

  if (j.contains("signals")) {
    const auto& s = j.at("signals");
    cfg.schedule.hw_force = s.value("hw_force", cfg.schedule.hw_force);
    cfg.schedule.hd_offset = s.value("hd_offset", cfg.schedule.hd_offset);
    cfg.schedule.tr_yaw = s.value("tr_yaw", cfg.schedule.tr_yaw);
    cfg.schedule.ramp_duration = s.value("ramp_duration", cfg.schedule.ramp_duration);
    cfg.schedule.audio_lead_time = s.value("audio_lead_time", cfg.schedule.audio_lead_time);
  }
  if (j.contains("task_gains")) {
    const auto& g = j.at("task_gains");
    if (g.contains("admittance"))
      cfg.task_gains.admittance = detail::vec6_from_json(g.at("admittance"), "task_gains.admittance");
    if (g.contains("stiffness"))
      cfg.task_gains.stiffness = detail::vec6_from_json(g.at("stiffness"), "task_gains.stiffness");
    if (g.contains("damping"))
      cfg.task_gains.damping = detail::vec6_from_json(g.at("damping"), "task_gains.damping");
    cfg.task_gains.force_threshold = g.value("force_threshold", cfg.task_gains.force_threshold);
    cfg.task_gains.moment_threshold = g.value("moment_threshold", cfg.task_gains.moment_threshold);
    cfg.task_gains.fade_duration = g.value("fade_duration", cfg.task_gains.fade_duration);
    cfg.task_gains.velocity_filter_time =
        g.value("velocity_filter_time", cfg.task_gains.velocity_filter_time);
  }
  if (j.contains("joint_gains")) {
    const auto& g = j.at("joint_gains");
    if (g.contains("kp"))
      cfg.joint_gains.kp = detail::joint_vector_from_json(g.at("kp"), cfg.model, "joint_gains.kp");
    if (g.contains("kd"))
      cfg.joint_gains.kd = detail::joint_vector_from_json(g.at("kd"), cfg.model, "joint_gains.kd");
    if (g.contains("admittance"))
      cfg.joint_gains.admittance =
          detail::joint_vector_from_json(g.at("admittance"), cfg.model, "joint_gains.admittance");
    if (g.contains("blend_max"))
      cfg.joint_gains.blend_max =
          detail::joint_vector_from_json(g.at("blend_max"), cfg.model, "joint_gains.blend_max");
    if (g.contains("blend_min"))
      cfg.joint_gains.blend_min =
          detail::joint_vector_from_json(g.at("blend_min"), cfg.model, "joint_gains.blend_min");
    cfg.joint_gains.blend_fade_duration =
        g.value("blend_fade_duration", cfg.joint_gains.blend_fade_duration);
  }
  if (j.contains("steps")) {
    const auto& s = j.at("steps");
    cfg.steps.forward_distance = s.value("forward_distance", cfg.steps.forward_distance);
    cfg.steps.lateral_distance = s.value("lateral_distance", cfg.steps.lateral_distance);
    cfg.steps.step_duration = s.value("duration", cfg.steps.step_duration);
    cfg.steps.base_motion_scale = s.value("base_motion_scale", cfg.steps.base_motion_scale);
    if (s.contains("sequence")) {
      for (const auto& item : s.at("sequence")) {
        StepSpec spec;
        spec.index = item.at("index").get<int>();
        spec.foot = foot_from_string(item.at("foot").get<std::string>());
        const auto& d = item.at("displacement");
        if (!d.is_array() || d.size() != 2)
          throw ConfigError("steps.sequence: displacement must be [x, y]");
        spec.displacement = Vec2(d[0].get<double>(), d[1].get<double>());
        spec.duration = item.value("duration", cfg.steps.step_duration);
        cfg.steps.sequence.push_back(spec);
      }
    }
  }
  if (j.contains("partner")) {
    const auto& p = j.at("partner");
    if (p.contains("mode")) cfg.partner.mode = partner_mode_from_string(p.at("mode").get<std::string>());
    cfg.partner.stiffness = p.value("stiffness", cfg.partner.stiffness);
    cfg.partner.damping = p.value("damping", cfg.partner.damping);
    cfg.partner.lag = p.value("lag", cfg.partner.lag);
    cfg.partner.push_distance = p.value("push_distance", cfg.partner.push_distance);
    cfg.partner.push_onset = p.value("push_onset", cfg.partner.push_onset);
    cfg.partner.noise_amplitude = p.value("noise_amplitude", cfg.partner.noise_amplitude);
  }
  cfg.stop_threshold = j.value("stop_threshold", cfg.stop_threshold);
  cfg.ft_filter_time = j.value("ft_filter_time", cfg.ft_filter_time);
  cfg.duration = j.value("duration", cfg.duration);
  cfg.timestep = j.value("timestep", cfg.timestep);
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.output_path = j.value("output", cfg.output_path);
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// block configuration
// ---------------------------------------------------------------------------

struct BlockConfig {
  std::string name;
  std::vector<TrialConfig> trials;
};

struct ProtocolConfig {
  std::uint64_t seed = 0;
  std::vector<BlockConfig> blocks;
};

/// Deep-merges trial json over the protocol's "defaults" section.
inline json merge_trial_json(const json& defaults, const json& trial) {
  json merged = defaults;
  merged.merge_patch(trial);
  return merged;
}

inline ProtocolConfig protocol_from_json(const json& j, const std::string& base_dir = "") {
  ProtocolConfig cfg;
  cfg.seed = j.value("seed", std::uint64_t{0});
  const json defaults = j.value("defaults", json::object());
  if (!j.contains("blocks")) throw ConfigError("protocol file: 'blocks' section is required");
  for (const auto& b : j.at("blocks")) {
    BlockConfig block;
    block.name = b.value("name", "block" + std::to_string(cfg.blocks.size() + 1));
    if (!b.contains("trials") || b.at("trials").empty())
      throw ConfigError("protocol block '" + block.name + "': needs a nonempty trial list");
    for (const auto& t : b.at("trials"))
      block.trials.push_back(trial_from_json(merge_trial_json(defaults, t), base_dir));
    cfg.blocks.push_back(std::move(block));
  }
  return cfg;
}

}  // namespace waltz
