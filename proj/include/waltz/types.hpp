#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace waltz {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Quat = Eigen::Quaterniond;

/// Joint-space vector ordered torso, then left arm, then right arm
/// (the ordering is fixed by the joint declaration order of the model).
using JointVector = Eigen::VectorXd;

/// Geometric Jacobian: rows 0..2 linear, rows 3..5 angular, one column per joint.
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Raised when a model or trial configuration is inconsistent.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when runtime input data (questionnaire CSV, log files) is invalid.
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

struct Pose {
  Vec3 position{Vec3::Zero()};
  Quat orientation{Quat::Identity()};
};

struct Twist {
  Vec3 linear{Vec3::Zero()};
  Vec3 angular{Vec3::Zero()};

  Vec6 vector() const {
    Vec6 v;
    v << linear, angular;
    return v;
  }
};

/// 3-D force plus 3-D moment acting at a frame.
struct Wrench {
  Vec3 force{Vec3::Zero()};
  Vec3 moment{Vec3::Zero()};

  Vec6 vector() const {
    Vec6 v;
    v << force, moment;
    return v;
  }

  static Wrench from_vector(const Vec6& v) {
    return Wrench{v.head<3>(), v.tail<3>()};
  }

  Wrench operator+(const Wrench& o) const {
    return Wrench{force + o.force, moment + o.moment};
  }

  Wrench operator-(const Wrench& o) const {
    return Wrench{force - o.force, moment - o.moment};
  }

  /// Componentwise diagonal gain (first three entries act on force,
  /// last three on moment).
  Wrench scaled(const Vec6& gains) const {
    return Wrench{force.cwiseProduct(gains.head<3>()),
                  moment.cwiseProduct(gains.tail<3>())};
  }

  bool all_finite() const {
    return force.allFinite() && moment.allFinite();
  }
};

/// Rotation-vector logarithm of a unit quaternion (axis * angle, angle in [0, pi]).
inline Vec3 quat_log(const Quat& q_in) {
  Quat q = q_in;
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();  // shortest path
  const Vec3 v = q.vec();
  const double vn = v.norm();
  if (vn < 1e-12) return 2.0 * v;  // small-angle limit of 2*atan2(vn, w)*v/vn
  const double angle = 2.0 * std::atan2(vn, q.w());
  return (angle / vn) * v;
}

/// Pose difference current (-) desired: position subtraction stacked on the
/// orientation log-map error, both expressed in the common base frame.
inline Vec6 pose_difference(const Pose& current, const Pose& desired) {
  Vec6 err;
  err.head<3>() = current.position - desired.position;
  err.tail<3>() = quat_log(current.orientation * desired.orientation.inverse());
  return err;
}

}  // namespace waltz
