#pragma once

#include <Eigen/Geometry>

#include <algorithm>
#include <cassert>
#include <cmath>

#include "inseam/common.hpp"

namespace inseam {

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double theta) {
  double two_pi = 2.0 * M_PI;
  double r = std::fmod(theta + M_PI, two_pi);
  if (r < 0.0) r += two_pi;
  return r - M_PI;
}

/// 6-DoF pose: translation (m) and roll/pitch/yaw (rad), angles in [-pi, pi).
/// Rotation convention: R = Rz(yaw) * Ry(pitch) * Rx(roll).
struct Pose6 {
  double x = 0.0, y = 0.0, z = 0.0;
  double roll = 0.0, pitch = 0.0, yaw = 0.0;

  Pose6() = default;
  Pose6(double x_, double y_, double z_, double roll_, double pitch_, double yaw_)
      : x(x_), y(y_), z(z_),
        roll(wrap_angle(roll_)), pitch(wrap_angle(pitch_)), yaw(wrap_angle(yaw_)) {}

  static Pose6 identity() { return {}; }

  static Pose6 from_vec(const Vec6& v) {
    return Pose6(v[0], v[1], v[2], v[3], v[4], v[5]);
  }

  Vec6 to_vec() const {
    Vec6 v;
    v << x, y, z, roll, pitch, yaw;
    return v;
  }

  Vec3 translation() const { return {x, y, z}; }

  Mat3 rotation() const {
    double cr = std::cos(roll), sr = std::sin(roll);
    double cp = std::cos(pitch), sp = std::sin(pitch);
    double cy = std::cos(yaw), sy = std::sin(yaw);
    Mat3 rx, ry, rz;
    rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
    ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
    rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
    return rz * ry * rx;
  }

  bool is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) &&
           std::isfinite(roll) && std::isfinite(pitch) && std::isfinite(yaw);
  }
};

/// Extracts rpy from a rotation matrix, result angles in [-pi, pi).
/// The gimbal singularity at |pitch| = pi/2 is outside the operating envelope;
/// callers assert |pitch| < 1.0 rad where it matters.
inline Vec3 matrix_to_rpy(const Mat3& r) {
  double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  double roll, yaw;
  if (std::abs(std::abs(r(2, 0)) - 1.0) < 1e-12) {
    // degenerate: pick yaw = 0
    yaw = 0.0;
    roll = std::atan2(-r(0, 1), r(1, 1));
  } else {
    roll = std::atan2(r(2, 1), r(2, 2));
    yaw = std::atan2(r(1, 0), r(0, 0));
  }
  return {wrap_angle(roll), wrap_angle(pitch), wrap_angle(yaw)};
}

/// Pose of frame b expressed through frame a (homogeneous-transform product).
inline Pose6 compose(const Pose6& a, const Pose6& b) {
  Mat3 ra = a.rotation();
  Vec3 t = ra * b.translation() + a.translation();
  Vec3 rpy = matrix_to_rpy(ra * b.rotation());
  return Pose6(t.x(), t.y(), t.z(), rpy.x(), rpy.y(), rpy.z());
}

inline Pose6 inverse(const Pose6& p) {
  Mat3 rt = p.rotation().transpose();
  Vec3 t = -(rt * p.translation());
  Vec3 rpy = matrix_to_rpy(rt);
  return Pose6(t.x(), t.y(), t.z(), rpy.x(), rpy.y(), rpy.z());
}

/// Rotates then translates p by pose.
inline Vec3 transform_point(const Pose6& pose, const Vec3& p) {
  return pose.rotation() * p + pose.translation();
}

/// Componentwise a - b with the three angular components wrapped to [-pi, pi).
inline Vec6 pose_difference(const Pose6& a, const Pose6& b) {
  Vec6 d = a.to_vec() - b.to_vec();
  for (int i = 3; i < 6; ++i) d[i] = wrap_angle(d[i]);
  return d;
}

/// a + delta on the pose chart (vector add, angles wrapped).
inline Pose6 pose_plus(const Pose6& a, const Vec6& delta) {
  Vec6 v = a.to_vec() + delta;
  return Pose6::from_vec(v);
}

/// Geodesic angle of the relative rotation between a and b, in [0, pi].
inline double rotation_angle_between(const Pose6& a, const Pose6& b) {
  Mat3 rel = a.rotation().transpose() * b.rotation();
  Eigen::AngleAxisd aa(rel);
  double ang = std::abs(aa.angle());
  return std::min(ang, 2.0 * M_PI - ang);
}

/// d(R(rpy) * p)/d(roll, pitch, yaw): 3x3 matrix of column derivatives.
inline Mat3 rotation_point_jacobian(const Pose6& pose, const Vec3& p) {
  double cr = std::cos(pose.roll), sr = std::sin(pose.roll);
  double cp = std::cos(pose.pitch), sp = std::sin(pose.pitch);
  double cy = std::cos(pose.yaw), sy = std::sin(pose.yaw);
  Mat3 rx, ry, rz, drx, dry, drz;
  rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  drx << 0, 0, 0, 0, -sr, -cr, 0, cr, -sr;
  dry << -sp, 0, cp, 0, 0, 0, -cp, 0, -sp;
  drz << -sy, -cy, 0, cy, -sy, 0, 0, 0, 0;
  Mat3 j;
  j.col(0) = rz * ry * drx * p;
  j.col(1) = rz * dry * rx * p;
  j.col(2) = drz * ry * rx * p;
  return j;
}

}  // namespace inseam
