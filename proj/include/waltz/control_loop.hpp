#pragma once

#include <optional>
#include <vector>

#include "waltz/jointspace.hpp"
#include "waltz/model.hpp"
#include "waltz/taskspace.hpp"
#include "waltz/types.hpp"

namespace waltz {

/// Single-threaded upper-body control cascade: measured wrenches in,
/// clamped joint position commands out. The robot is position-controlled,
/// so the executed state tracks the command exactly one tick behind.
class ControlLoop {
public:
  struct Input {
    std::vector<Wrench> measured;                       // per hand
    std::vector<Wrench> applied;                        // per hand
    std::vector<std::array<bool, 6>> applied_axes;      // per hand
    std::vector<Vec3> setpoint_offset;                  // per hand, base frame
    double torso_yaw_offset = 0.0;                      // rad, added to q_d
  };

  struct Output {
    std::vector<Pose> hand_pose;      // before this tick's command
    std::vector<Pose> setpoint;
    std::vector<Vec6> pose_error;
    std::vector<Twist> hand_velocity;  // the loop's filtered estimate
    std::vector<Wrench> task;         // total virtual wrench per hand
    std::vector<double> lambda;
    std::vector<bool> over_threshold;
    JointVector tau_admittance;
    JointVector q;     // executed positions used this tick
    JointVector q_c;   // new position command
    JointVector qd_c;  // clamped velocity command
    JointVector blend;
  };

  ControlLoop(KinematicModel model, TaskGains task_gains, JointGains joint_gains,
              JointVector hold_posture,
              std::optional<std::size_t> torso_yaw_joint = std::nullopt)
      : model_(std::move(model)),
        task_gains_(task_gains),
        joint_gains_(joint_gains),
        q_hold_(std::move(hold_posture)) {
    model_.check_joint_vector(q_hold_);
    task_gains_.validate();
    joint_gains_.validate(model_.joint_count());
    torso_yaw_ = torso_yaw_joint;
    if (!torso_yaw_ && model_.has_joint("torso_yaw"))
      torso_yaw_ = model_.joint_index("torso_yaw");

    q_ = q_hold_;
    qd_ = model_.zero();
    fades_.resize(model_.hand_count());
    vel_filter_.assign(model_.hand_count(), Vec6::Zero());
    desired_.reserve(model_.hand_count());
    for (std::size_t h = 0; h < model_.hand_count(); ++h)
      desired_.push_back(forward_kinematics(model_, q_hold_, h));
    cmd_.q_c = q_hold_;
    cmd_.blend = joint_gains_.blend_max;
  }

  const KinematicModel& model() const { return model_; }
  const JointVector& q() const { return q_; }
  const Pose& desired_pose(std::size_t hand) const { return desired_.at(hand); }
  const JointVector& hold_posture() const { return q_hold_; }

  Output tick(const Input& in, double dt, double t) {
    const std::size_t nh = model_.hand_count();
    if (in.measured.size() != nh || in.applied.size() != nh ||
        in.applied_axes.size() != nh || in.setpoint_offset.size() != nh)
      throw ConfigError("control loop: input arity does not match hand count");
    if (in.torso_yaw_offset != 0.0 && !torso_yaw_)
      throw ConfigError("control loop: torso yaw offset requested but the model has no torso_yaw joint");

    Output out;
    out.hand_pose.resize(nh);
    out.setpoint.resize(nh);
    out.pose_error.resize(nh);
    out.hand_velocity.resize(nh);
    out.task.resize(nh);
    out.lambda.resize(nh);
    out.over_threshold.resize(nh);
    out.q = q_;

    std::vector<Wrench> task(nh);
    std::vector<bool> over(nh);
    for (std::size_t h = 0; h < nh; ++h) {
      const Pose pose = forward_kinematics(model_, q_, h);
      const Jacobian J = jacobian(model_, q_, h);
      // low-passed velocity estimate: the raw one-tick difference would feed
      // the damping term at the Nyquist mode
      const Vec6 v_raw = J * qd_;
      const double beta = dt / (task_gains_.velocity_filter_time + dt);
      vel_filter_[h] += beta * (v_raw - vel_filter_[h]);
      const Twist vel{vel_filter_[h].head<3>(), vel_filter_[h].tail<3>()};

      Pose setpoint = desired_[h];
      setpoint.position += in.setpoint_offset[h];
      const Vec6 err = pose_difference(pose, setpoint);

      fades_[h] = update_fade(task_gains_, fades_[h], in.measured[h],
                              in.applied_axes[h], dt, t);
      task[h] = task_wrench(task_gains_, fades_[h], in.measured[h], err, vel,
                            in.applied[h]);
      over[h] = over_threshold(task_gains_, in.measured[h]);

      out.hand_pose[h] = pose;
      out.setpoint[h] = setpoint;
      out.pose_error[h] = err;
      out.hand_velocity[h] = vel;
      out.task[h] = task[h];
      out.lambda[h] = fades_[h].lambda;
      out.over_threshold[h] = over[h];
    }

    out.tau_admittance = project_wrenches(model_, q_, task);

    JointVector q_desired = q_hold_;
    if (torso_yaw_) q_desired[static_cast<Eigen::Index>(*torso_yaw_)] += in.torso_yaw_offset;
    const JointVector tau_imp = joint_impedance(joint_gains_, q_ - q_desired, qd_);

    cmd_ = update_blend(joint_gains_, std::move(cmd_), over, dt);
    const JointVector qd_c = command_velocity(joint_gains_, cmd_, out.tau_admittance, tau_imp);
    auto [next, qd_clamped] = integrate_command(model_, std::move(cmd_), qd_c, dt);
    cmd_ = std::move(next);

    // position-controlled execution: the command becomes the next state
    q_ = cmd_.q_c;
    qd_ = qd_clamped;

    out.q_c = cmd_.q_c;
    out.qd_c = qd_clamped;
    out.blend = cmd_.blend;
    return out;
  }

private:
  KinematicModel model_;
  TaskGains task_gains_;
  JointGains joint_gains_;
  JointVector q_hold_;
  std::optional<std::size_t> torso_yaw_;

  JointVector q_;
  JointVector qd_;
  std::vector<FadeState> fades_;
  std::vector<Vec6> vel_filter_;
  std::vector<Pose> desired_;
  JointCommandState cmd_;
};

}  // namespace waltz
