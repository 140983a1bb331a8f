// Acceptance suite: one criterion per function, one PASS/FAIL line each,
// nonzero exit when anything fails. Tolerances are pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "waltz/log_io.hpp"
#include "waltz/waltz.hpp"

using namespace waltz;

namespace {

struct Check {
  std::string name;
  std::function<void()> fn;
};

int failures = 0;

#define REQUIRE_TRUE(cond, msg)                                       \
  do {                                                                \
    if (!(cond)) throw std::runtime_error(std::string("line ") +      \
                                          std::to_string(__LINE__) +  \
                                          ": " + (msg));              \
  } while (0)

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

JointVector random_config(const KinematicModel& model, std::mt19937_64& rng) {
  JointVector q = model.zero();
  for (std::size_t i = 0; i < model.joint_count(); ++i) {
    const JointDef& j = model.joints()[i];
    std::uniform_real_distribution<double> u(j.pos_min, j.pos_max);
    q[static_cast<Eigen::Index>(i)] = u(rng);
  }
  return q;
}

Jacobian fd_jacobian(const KinematicModel& model, const JointVector& q, std::size_t hand,
                     double h = 1e-6) {
  Jacobian J = Jacobian::Zero(6, q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    JointVector qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    const Pose pp = forward_kinematics(model, qp, hand);
    const Pose pm = forward_kinematics(model, qm, hand);
    J.block<3, 1>(0, i) = (pp.position - pm.position) / (2.0 * h);
    J.block<3, 1>(3, i) = quat_log(pp.orientation * pm.orientation.inverse()) / (2.0 * h);
  }
  return J;
}

TrialConfig make_trial(const std::string& label, const std::string& partner_mode,
                       double duration, std::uint64_t seed) {
  json j;
  j["label"] = label;
  j["duration"] = duration;
  j["partner"]["mode"] = partner_mode;
  j["seed"] = seed;
  return trial_from_json(j);
}

ControlLoop make_loop() {
  const KinematicModel model = default_model();
  return ControlLoop(model, default_task_gains(), default_joint_gains(model),
                     default_hold_posture(model));
}

ControlLoop::Input zero_input(std::size_t nh) {
  ControlLoop::Input in;
  in.measured.resize(nh);
  in.applied.resize(nh);
  in.applied_axes.resize(nh);
  in.setpoint_offset.assign(nh, Vec3::Zero());
  return in;
}

// --------------------------------------------------------------------------
// A1: analytic Jacobian vs central finite differences, 100 seeded configs
// --------------------------------------------------------------------------
void a1_jacobian_oracle() {
  const KinematicModel model = default_model();
  std::mt19937_64 rng(20240601);
  const double t0 = now_seconds();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const JointVector q = random_config(model, rng);
    for (std::size_t hand = 0; hand < 2; ++hand) {
      const double err =
          (jacobian(model, q, hand) - fd_jacobian(model, q, hand)).cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
    }
  }
  const double elapsed = now_seconds() - t0;
  REQUIRE_TRUE(worst < 1e-6, "max |J - J_fd| = " + std::to_string(worst));
  REQUIRE_TRUE(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
}

// --------------------------------------------------------------------------
// A2: compliance gate under a sustained 6 N synthetic force
// --------------------------------------------------------------------------
void a2_compliance_gate() {
  const double dt = 0.005;
  const TaskGains tg = default_task_gains();
  ControlLoop loop = make_loop();
  const Pose x_d = loop.desired_pose(0);
  const Vec3 dir = Vec3::UnitX();

  ControlLoop::Input in = zero_input(2);
  in.measured[0].force = 6.0 * dir;

  const int fade_ticks = static_cast<int>(std::ceil(tg.fade_duration / dt));
  double t = 0.0;
  double along_prev = 0.0;
  bool impedance_zeroed = false;
  int zero_tick = -1;

  for (int k = 0; k < fade_ticks + 200; ++k, t += dt) {
    const ControlLoop::Output out = loop.tick(in, dt, t);
    const double along = (out.hand_pose[0].position - x_d.position).dot(dir);
    REQUIRE_TRUE(along >= along_prev - 1e-12, "hand not monotone along the force");
    along_prev = along;
    if (out.lambda[0] == 0.0 && zero_tick < 0) zero_tick = k;
    if (out.lambda[0] == 0.0) {
      FadeState fade;
      fade.lambda = 0.0;
      const Wrench imp = impedance_wrench(tg, fade, out.pose_error[0], out.hand_velocity[0]);
      REQUIRE_TRUE(imp.vector().norm() == 0.0, "impedance wrench not exactly zero");
      impedance_zeroed = true;
    }
  }
  REQUIRE_TRUE(impedance_zeroed, "gate never engaged");
  REQUIRE_TRUE(zero_tick <= fade_ticks + 1,
               "gate engaged only after " + std::to_string(zero_tick) + " ticks");
  REQUIRE_TRUE(along_prev > 0.05, "hand barely moved under 6 N");

  // release: hand must come home within 3 s
  in.measured[0] = Wrench{};
  double err = 1e9;
  for (int k = 0; k < static_cast<int>(3.0 / dt); ++k, t += dt) {
    const ControlLoop::Output out = loop.tick(in, dt, t);
    err = (out.hand_pose[0].position - x_d.position).norm();
  }
  REQUIRE_TRUE(err < 0.01, "hand " + std::to_string(err) + " m from setpoint after 3 s");

  // a 4 N force never zeroes the impedance
  ControlLoop loop4 = make_loop();
  ControlLoop::Input in4 = zero_input(2);
  in4.measured[0].force = 4.0 * dir;
  for (int k = 0; k < 400; ++k) {
    const ControlLoop::Output out = loop4.tick(in4, dt, k * dt);
    REQUIRE_TRUE(out.lambda[0] == 1.0, "4 N force faded the impedance");
  }
}

// --------------------------------------------------------------------------
// A3: HD setpoint offset peak exactly 5 cm, realized displacement >= 4 cm
// --------------------------------------------------------------------------
void a3_hd_magnitude() {
  const TrialConfig cfg = make_trial("HD", "absent", 12.0, 11);
  const TrialLog log = run_trial(cfg);
  ControlLoop probe(cfg.model, cfg.task_gains, cfg.joint_gains, cfg.hold_posture);

  double peak_offset[2] = {0.0, 0.0};
  double peak_realized[2] = {0.0, 0.0};
  for (const TickRecord& r : log.records) {
    for (std::size_t h = 0; h < 2; ++h) {
      const Vec3 x_d = probe.desired_pose(h).position;
      peak_offset[h] =
          std::max(peak_offset[h], (r.hands[h].setpoint.position - x_d).norm());
      peak_realized[h] =
          std::max(peak_realized[h], (r.hands[h].pose.position - x_d).norm());
    }
  }
  for (std::size_t h = 0; h < 2; ++h) {
    REQUIRE_TRUE(std::abs(peak_offset[h] - 0.05) < 1e-9,
                 "hand " + std::to_string(h) + " peak offset " +
                     std::to_string(peak_offset[h]));
    REQUIRE_TRUE(peak_realized[h] >= 0.04,
                 "hand " + std::to_string(h) + " realized only " +
                     std::to_string(peak_realized[h]) + " m");
  }
}

// --------------------------------------------------------------------------
// A4: TR yaw offset peak exactly 0.2 rad with hands pinned within 2 cm
// --------------------------------------------------------------------------
void a4_tr_signal() {
  const TrialConfig cfg = make_trial("TR", "absent", 12.0, 13);
  const TrialLog log = run_trial(cfg);

  double peak_offset = 0.0;
  double worst_hand = 0.0;
  for (const TickRecord& r : log.records) {
    peak_offset = std::max(peak_offset, std::abs(r.torso_yaw_offset));
    for (const HandRecord& h : r.hands)
      worst_hand =
          std::max(worst_hand, (h.pose.position - h.setpoint.position).norm());
  }
  REQUIRE_TRUE(std::abs(peak_offset - 0.2) < 1e-9,
               "peak yaw offset " + std::to_string(peak_offset));
  REQUIRE_TRUE(worst_hand < 0.02,
               "hand deviation " + std::to_string(worst_hand) + " m");
}

// --------------------------------------------------------------------------
// A5: push-away latches the stop within one tick of the threshold crossing
// --------------------------------------------------------------------------
void a5_stop_rule() {
  TrialConfig cfg = make_trial("NS", "push_away", 15.0, 17);
  cfg.partner.push_onset = 4.0;
  const TrialLog log = run_trial(cfg);
  REQUIRE_TRUE(log.stopped, "stop never latched");

  // first tick whose pose error exceeds the threshold
  double cross_time = -1.0;
  for (const TickRecord& r : log.records) {
    for (const HandRecord& h : r.hands) {
      if ((h.pose.position - h.setpoint.position).norm() > cfg.stop_threshold) {
        cross_time = r.t;
        break;
      }
    }
    if (cross_time >= 0) break;
  }
  REQUIRE_TRUE(cross_time >= 0, "deflection never exceeded the threshold");

  double stop_time = -1.0;
  for (const TrialEvent& e : log.events)
    if (e.kind == "stop") stop_time = e.t;
  REQUIRE_TRUE(stop_time >= 0, "no stop event in the log");
  REQUIRE_TRUE(std::abs(stop_time - cross_time) <= cfg.timestep + 1e-12,
               "stop lagged the crossing by " + std::to_string(stop_time - cross_time));

  // no step onsets and no base motion afterward
  Vec2 base_at_stop{-1000, -1000};
  for (const TrialEvent& e : log.events)
    if (e.kind == "step_onset")
      REQUIRE_TRUE(e.t <= stop_time, "step onset after the stop");
  bool base_set = false;
  for (const TickRecord& r : log.records) {
    if (r.t < stop_time) continue;
    if (!base_set) {
      base_at_stop = r.base;
      base_set = true;
    }
    REQUIRE_TRUE(r.base == base_at_stop, "base moved after the stop");
  }

  // compliance remains active: the pushed hand keeps moving after the stop
  const TickRecord* just_after = nullptr;
  for (const TickRecord& r : log.records)
    if (r.t > stop_time + 0.05) {
      just_after = &r;
      break;
    }
  REQUIRE_TRUE(just_after != nullptr, "trial ended at the stop");
  const Vec3 then = just_after->hands[0].pose.position;
  const Vec3 end = log.records.back().hands[0].pose.position;
  REQUIRE_TRUE((end - then).norm() > 0.005, "hand frozen after the stop");
}

// --------------------------------------------------------------------------
// A6: 30 s NS trial with a compliant partner: 5 closed cycles
// --------------------------------------------------------------------------
void a6_box_closure() {
  const TrialConfig cfg = make_trial("NS", "compliant", 30.0, 19);
  const TrialLog log = run_trial(cfg);

  REQUIRE_TRUE(!log.stopped, "dance stopped early");
  REQUIRE_TRUE(log.steps_emitted == 30, std::to_string(log.steps_emitted) + " steps");
  REQUIRE_TRUE(log.final_base.norm() <= 1e-9,
               "net base displacement " + std::to_string(log.final_base.norm()));

  const std::vector<StepSpec> steps = cfg.steps.build();
  for (const StepSpec& s : steps) {
    const double ax = std::abs(s.displacement.x());
    const double ay = std::abs(s.displacement.y());
    REQUIRE_TRUE(ax == 0.0 || ax == 0.13, "forward distance not 0.13");
    REQUIRE_TRUE(ay == 0.0 || ay == 0.145, "lateral distance not 0.145");
  }
  int onsets = 0;
  for (const TrialEvent& e : log.events)
    if (e.kind == "step_onset") ++onsets;
  REQUIRE_TRUE(onsets == 30, "expected 30 onsets, saw " + std::to_string(onsets));
}

// --------------------------------------------------------------------------
// A7: two identical hands reduce to the single-hand torques
// --------------------------------------------------------------------------
void a7_projection_normalization() {
  const KinematicModel base = default_model();
  const JointVector hold = default_hold_posture(base);

  std::vector<HandFrame> twin_hands = {base.hands()[0], base.hands()[0]};
  twin_hands[1].name = "left_palm_twin";
  const KinematicModel twin =
      KinematicModel::create(std::vector<JointDef>(base.joints()), std::move(twin_hands));
  const KinematicModel solo =
      KinematicModel::create(std::vector<JointDef>(base.joints()), {base.hands()[0]});

  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    Wrench w;
    w.force = Vec3(n(rng), n(rng), n(rng));
    w.moment = Vec3(n(rng), n(rng), n(rng));
    std::vector<Wrench> both{w, w};
    std::vector<Wrench> one{w};
    const JointVector tau2 = project_wrenches(twin, hold, both);
    const JointVector tau1 = project_wrenches(solo, hold, one);
    REQUIRE_TRUE((tau2 - tau1).cwiseAbs().maxCoeff() < 1e-12,
                 "normalization off by " +
                     std::to_string((tau2 - tau1).cwiseAbs().maxCoeff()));
  }
}

// --------------------------------------------------------------------------
// A8: blend floor reached exactly within the fade duration
// --------------------------------------------------------------------------
void a8_blend_floor() {
  const double dt = 0.005;
  const KinematicModel model = default_model();
  const JointGains jg = default_joint_gains(model);
  ControlLoop loop = make_loop();
  ControlLoop::Input in = zero_input(2);
  in.measured[0].force = Vec3(6.0, 0, 0);  // sustained over-threshold contact

  const int fade_ticks = static_cast<int>(std::ceil(jg.blend_fade_duration / dt));
  JointVector blend;
  int reached = -1;
  for (int k = 0; k < fade_ticks + 50; ++k) {
    blend = loop.tick(in, dt, k * dt).blend;
    if (reached < 0 && blend == jg.blend_min) reached = k;
  }
  REQUIRE_TRUE(reached >= 0, "blend floor never reached");
  REQUIRE_TRUE(reached <= fade_ticks + 1,
               "floor reached after " + std::to_string(reached) + " ticks");
  const auto yaw = static_cast<Eigen::Index>(model.joint_index("torso_yaw"));
  const auto pitch = static_cast<Eigen::Index>(model.joint_index("torso_pitch"));
  REQUIRE_TRUE(blend[yaw] == 0.6 && blend[pitch] == 0.6, "torso floor is not 0.6");
  for (std::size_t i = 0; i < model.joint_count(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (k == yaw || k == pitch) continue;
    REQUIRE_TRUE(blend[k] == 0.0, "arm blend floor is not 0");
  }
}

// --------------------------------------------------------------------------
// A9: full protocol determinism and wall-clock budget
// --------------------------------------------------------------------------
std::vector<TrialLog> protocol_logs;  // kept for A11

std::vector<TrialLog> run_protocol(const ProtocolConfig& protocol) {
  std::vector<TrialLog> logs;
  for (std::size_t b = 0; b < protocol.blocks.size(); ++b) {
    BlockResult result =
        run_block(protocol.blocks[b].trials, protocol.seed + b, protocol.blocks[b].name);
    for (TrialLog& log : result.logs) logs.push_back(std::move(log));
  }
  return logs;
}

void a9_protocol_determinism() {
  const json j = load_json_file(std::string(WALTZ_SOURCE_DIR) + "/configs/protocol.json");
  const ProtocolConfig protocol =
      protocol_from_json(j, std::string(WALTZ_SOURCE_DIR) + "/configs");
  std::size_t total = 0;
  for (const BlockConfig& b : protocol.blocks) total += b.trials.size();
  REQUIRE_TRUE(total == 13, "protocol does not have 13 trials");

  const double t0 = now_seconds();
  std::vector<TrialLog> first = run_protocol(protocol);
  const std::vector<TrialLog> second = run_protocol(protocol);
  const double elapsed = now_seconds() - t0;

  REQUIRE_TRUE(first.size() == 13 && second.size() == 13, "wrong trial count");
  for (std::size_t i = 0; i < first.size(); ++i) {
    REQUIRE_TRUE(to_csv(first[i]) == to_csv(second[i]),
                 "trial " + first[i].label + " logs differ");
    REQUIRE_TRUE(events_to_jsonl(first[i]) == events_to_jsonl(second[i]),
                 "trial " + first[i].label + " events differ");
  }
  REQUIRE_TRUE(elapsed < 90.0,
               "two protocol passes took " + std::to_string(elapsed) + " s");
  protocol_logs = std::move(first);
}

// --------------------------------------------------------------------------
// A11: command continuity across every realized trial log
// --------------------------------------------------------------------------
void a11_command_continuity() {
  REQUIRE_TRUE(!protocol_logs.empty(), "no protocol logs (A9 must pass first)");
  const KinematicModel model = default_model();
  for (const TrialLog& log : protocol_logs) {
    REQUIRE_TRUE(log.records.size() == 6000, "trial " + log.label + " record count");
    for (std::size_t k = 1; k < log.records.size(); ++k) {
      const JointVector dq = log.records[k].q_c - log.records[k - 1].q_c;
      for (std::size_t i = 0; i < model.joint_count(); ++i)
        REQUIRE_TRUE(std::abs(dq[static_cast<Eigen::Index>(i)]) <=
                         model.joints()[i].vel_limit * log.timestep + 1e-15,
                     "q_c jump in trial " + log.label);
    }
  }
}

// --------------------------------------------------------------------------
// A10: preference metric vs brute force on 1000 random tables
// --------------------------------------------------------------------------
double brute_force_preference(const VoteTable& votes, const std::string& trial) {
  std::set<std::string> participants;
  for (const VoteRow& r : votes.rows) participants.insert(r.participant);
  double sum = 0.0;
  for (const std::string& p : participants) {
    int best = 0, worst = 0;
    for (const VoteRow& r : votes.rows)
      if (r.participant == p && r.trial == trial) {
        if (r.vote == Vote::Best) best = 1;
        if (r.vote == Vote::Worst) worst = 1;
      }
    sum += best - worst;
  }
  return 3.0 + (2.0 / static_cast<double>(participants.size())) * sum;
}

void a10_preference_oracle() {
  std::mt19937_64 rng(31415);
  const std::vector<std::string> labels = {"NS", "HW", "HD", "TR", "SC", "SD"};
  std::uniform_int_distribution<int> np(1, 22);
  std::uniform_int_distribution<int> kind(0, 5);

  for (int table = 0; table < 1000; ++table) {
    const int n = np(rng);
    VoteTable t;
    t.labels.insert(labels.begin(), labels.end());
    for (int p = 0; p < n; ++p)
      for (const std::string& label : labels) {
        t.rows.push_back({"p" + std::to_string(p), 1, label, Vote::None});
        const int v = kind(rng);
        if (v == 1) t.rows.push_back({"p" + std::to_string(p), 1, label, Vote::Best});
        if (v == 2) t.rows.push_back({"p" + std::to_string(p), 2, label, Vote::Worst});
      }
    for (const std::string& label : labels) {
      const double got = preference_metric(t, label);
      const double want = brute_force_preference(t, label);
      REQUIRE_TRUE(got == want, "mismatch " + std::to_string(got) + " vs " +
                                    std::to_string(want));
    }
  }

  // endpoints realized by all-worst / empty / all-best tables
  VoteTable endpoint;
  endpoint.labels.insert("X");
  for (int p = 0; p < 8; ++p)
    endpoint.rows.push_back({"p" + std::to_string(p), 1, "X", Vote::None});
  REQUIRE_TRUE(preference_metric(endpoint, "X") == 3.0, "empty table endpoint");
  for (int p = 0; p < 8; ++p)
    endpoint.rows.push_back({"p" + std::to_string(p), 1, "X", Vote::Best});
  REQUIRE_TRUE(preference_metric(endpoint, "X") == 5.0, "all-best endpoint");
  VoteTable worst_table;
  worst_table.labels.insert("X");
  for (int p = 0; p < 8; ++p)
    worst_table.rows.push_back({"p" + std::to_string(p), 1, "X", Vote::Worst});
  REQUIRE_TRUE(preference_metric(worst_table, "X") == 1.0, "all-worst endpoint");
}

}  // namespace

int main() {
  const std::vector<Check> checks = {
      {"A1 jacobian finite-difference oracle", a1_jacobian_oracle},
      {"A2 compliance gate at the 5 N threshold", a2_compliance_gate},
      {"A3 HD setpoint offset magnitude and tracking", a3_hd_magnitude},
      {"A4 TR torso yaw offset with pinned hands", a4_tr_signal},
      {"A5 deflection stop rule", a5_stop_rule},
      {"A6 box-step closure over 30 s", a6_box_closure},
      {"A7 wrench projection normalization", a7_projection_normalization},
      {"A8 blend floor values and timing", a8_blend_floor},
      {"A9 protocol determinism and wall-clock budget", a9_protocol_determinism},
      {"A10 preference metric brute-force oracle", a10_preference_oracle},
      {"A11 command continuity across all trial logs", a11_command_continuity},
  };

  for (const Check& check : checks) {
    try {
      check.fn();
      std::printf("PASS  %s\n", check.name.c_str());
    } catch (const std::exception& e) {
      std::printf("FAIL  %s: %s\n", check.name.c_str(), e.what());
      ++failures;
    }
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
