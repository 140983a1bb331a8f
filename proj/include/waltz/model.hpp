#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "waltz/types.hpp"

namespace waltz {

/// One revolute joint of the upper-body tree. `parent` names either another
/// joint or the base frame. `offset` is the translation from the parent frame
/// to this joint's frame, expressed in the parent frame (meters); `axis` is
/// the rotation axis in this joint's own frame (unit vector).
struct JointDef {
  std::string name;
  std::string parent;
  Vec3 axis{Vec3::UnitZ()};
  Vec3 offset{Vec3::Zero()};
  double pos_min = 0.0;
  double pos_max = 0.0;
  double vel_limit = 0.0;
};

/// End-effector frame: a fixed translation from its parent joint frame.
struct HandFrame {
  std::string name;
  std::string parent;
  Vec3 offset{Vec3::Zero()};
};

/// Kinematic description of the upper body: a joint tree rooted at the base
/// frame plus one or more hand frames. Immutable after construction; all
/// queries are pure functions, safe to share across threads.
class KinematicModel {
public:
  /// Validates and builds the model. Joints must be declared parent-first;
  /// the declaration order defines the JointVector component order.
  static KinematicModel create(std::vector<JointDef> joints,
                               std::vector<HandFrame> hands,
                               std::string base_frame = "base") {
    KinematicModel m;
    m.base_frame_ = std::move(base_frame);
    m.joints_ = std::move(joints);
    m.hands_ = std::move(hands);
    if (m.joints_.empty()) throw ConfigError("model: no joints defined");
    if (m.hands_.empty()) throw ConfigError("model: no hand frames defined");

    m.parent_.resize(m.joints_.size());
    for (std::size_t i = 0; i < m.joints_.size(); ++i) {
      const JointDef& j = m.joints_[i];
      if (j.name.empty()) throw ConfigError("model: unnamed joint");
      for (std::size_t k = 0; k < i; ++k) {
        if (m.joints_[k].name == j.name)
          throw ConfigError("model: duplicate joint name '" + j.name + "'");
      }
      if (!j.offset.allFinite())
        throw ConfigError("model: non-finite offset on joint '" + j.name + "'");
      if (std::abs(j.axis.norm() - 1.0) > 1e-9)
        throw ConfigError("model: axis of joint '" + j.name + "' is not unit norm");
      if (!(j.pos_min < j.pos_max))
        throw ConfigError("model: joint '" + j.name + "' needs pos_min < pos_max");
      if (!(j.vel_limit > 0.0))
        throw ConfigError("model: joint '" + j.name + "' needs vel_limit > 0");
      if (j.parent == m.base_frame_) {
        m.parent_[i] = kBase;
      } else {
        m.parent_[i] = m.find_joint(j.parent);
        if (m.parent_[i] == kBase || static_cast<std::size_t>(m.parent_[i]) >= i)
          throw ConfigError("model: joint '" + j.name +
                            "' references unknown or later parent '" + j.parent + "'");
      }
    }

    m.hand_parent_.resize(m.hands_.size());
    m.chains_.resize(m.hands_.size());
    for (std::size_t h = 0; h < m.hands_.size(); ++h) {
      const HandFrame& f = m.hands_[h];
      if (f.name.empty()) throw ConfigError("model: unnamed hand frame");
      if (!f.offset.allFinite())
        throw ConfigError("model: non-finite offset on hand '" + f.name + "'");
      const int p = m.find_joint(f.parent);
      if (p == kBase)
        throw ConfigError("model: hand '" + f.name + "' references unknown parent '" +
                          f.parent + "'");
      m.hand_parent_[h] = static_cast<std::size_t>(p);
      // ancestor chain, base -> hand order
      std::vector<std::size_t> chain;
      for (int j = p; j != kBase; j = m.parent_[static_cast<std::size_t>(j)])
        chain.push_back(static_cast<std::size_t>(j));
      m.chains_[h].assign(chain.rbegin(), chain.rend());
    }
    return m;
  }

  std::size_t joint_count() const { return joints_.size(); }
  std::size_t hand_count() const { return hands_.size(); }
  const std::vector<JointDef>& joints() const { return joints_; }
  const std::vector<HandFrame>& hands() const { return hands_; }
  const std::string& base_frame() const { return base_frame_; }

  /// Joint indices on the chain from base to the given hand.
  const std::vector<std::size_t>& chain(std::size_t hand) const {
    check_hand(hand);
    return chains_[hand];
  }

  std::size_t hand_index(const std::string& name) const {
    for (std::size_t h = 0; h < hands_.size(); ++h)
      if (hands_[h].name == name) return h;
    throw ConfigError("model: unknown hand frame '" + name + "'");
  }

  /// Index of a joint by name; throws ConfigError when absent.
  std::size_t joint_index(const std::string& name) const {
    const int i = find_joint(name);
    if (i == kBase) throw ConfigError("model: unknown joint '" + name + "'");
    return static_cast<std::size_t>(i);
  }

  bool has_joint(const std::string& name) const { return find_joint(name) != kBase; }

  JointVector zero() const { return JointVector::Zero(static_cast<Eigen::Index>(joints_.size())); }

  void check_hand(std::size_t hand) const {
    if (hand >= hands_.size())
      throw ConfigError("model: hand index " + std::to_string(hand) + " out of range");
  }

  void check_joint_vector(const JointVector& q) const {
    if (static_cast<std::size_t>(q.size()) != joints_.size())
      throw ConfigError("model: joint vector length " + std::to_string(q.size()) +
                        " does not match joint count " + std::to_string(joints_.size()));
  }

  std::size_t hand_parent(std::size_t hand) const {
    check_hand(hand);
    return hand_parent_[hand];
  }

private:
  static constexpr int kBase = -1;

  int find_joint(const std::string& name) const {
    for (std::size_t i = 0; i < joints_.size(); ++i)
      if (joints_[i].name == name) return static_cast<int>(i);
    return kBase;
  }

  std::string base_frame_;
  std::vector<JointDef> joints_;
  std::vector<HandFrame> hands_;
  std::vector<int> parent_;
  std::vector<std::size_t> hand_parent_;
  std::vector<std::vector<std::size_t>> chains_;
};

/// Pose of a hand frame in the base frame. Pure and deterministic; values
/// outside position limits still evaluate.
inline Pose forward_kinematics(const KinematicModel& model, const JointVector& q,
                               std::size_t hand) {
  model.check_hand(hand);
  model.check_joint_vector(q);
  Vec3 p = Vec3::Zero();
  Quat r = Quat::Identity();
  for (std::size_t j : model.chain(hand)) {
    const JointDef& joint = model.joints()[j];
    p += r * joint.offset;
    r = r * Quat(Eigen::AngleAxisd(q[static_cast<Eigen::Index>(j)], joint.axis));
  }
  p += r * model.hands()[hand].offset;
  return Pose{p, r};
}

/// Geometric Jacobian of a hand in the base frame. Columns of joints not on
/// the hand's chain are zero; shared torso columns are populated for both hands.
inline Jacobian jacobian(const KinematicModel& model, const JointVector& q,
                         std::size_t hand) {
  model.check_hand(hand);
  model.check_joint_vector(q);
  Jacobian J = Jacobian::Zero(6, static_cast<Eigen::Index>(model.joint_count()));

  // forward pass: joint origins and world axes along the chain
  const auto& chain = model.chain(hand);
  std::vector<Vec3> origins(chain.size());
  std::vector<Vec3> axes(chain.size());
  Vec3 p = Vec3::Zero();
  Quat r = Quat::Identity();
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const JointDef& joint = model.joints()[chain[k]];
    p += r * joint.offset;
    origins[k] = p;
    axes[k] = r * joint.axis;  // own rotation leaves its axis invariant
    r = r * Quat(Eigen::AngleAxisd(q[static_cast<Eigen::Index>(chain[k])], joint.axis));
  }
  const Vec3 p_hand = p + r * model.hands()[hand].offset;

  for (std::size_t k = 0; k < chain.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(chain[k]);
    J.block<3, 1>(0, col) = axes[k].cross(p_hand - origins[k]);
    J.block<3, 1>(3, col) = axes[k];
  }
  return J;
}

/// Clips qdot to the velocity limits, integrates one step, and clips the
/// resulting position into the position limits. Total function, idempotent
/// on feasible inputs.
inline std::pair<JointVector, JointVector> clamp_to_limits(const KinematicModel& model,
                                                           const JointVector& q,
                                                           const JointVector& qdot,
                                                           double dt) {
  model.check_joint_vector(q);
  model.check_joint_vector(qdot);
  JointVector qd_out = qdot;
  JointVector q_out = q;
  for (std::size_t i = 0; i < model.joint_count(); ++i) {
    const JointDef& j = model.joints()[i];
    const auto k = static_cast<Eigen::Index>(i);
    qd_out[k] = std::clamp(qdot[k], -j.vel_limit, j.vel_limit);
    q_out[k] = std::clamp(q[k] + qd_out[k] * dt, j.pos_min, j.pos_max);
  }
  return {q_out, qd_out};
}

}  // namespace waltz
