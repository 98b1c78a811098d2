#pragma once

#include <map>
#include <string>
#include <vector>

#include "inseam/geometry/pose.hpp"

namespace inseam {

/// Per-timestep optimization variables: the object pose plus the contact
/// point estimates. Wall points live in the wall (== world) frame; on-feature
/// object points live in the object frame. Dimension is
/// 6 + 3*(#wall_points) + 3*(#object_points_var).
struct TimestepState {
  Pose6 pose;
  std::map<std::string, Vec3> wall_points;
  std::map<std::string, Vec3> object_points_var;
  double timestamp = 0.0;

  int dim() const {
    return 6 + 3 * int(wall_points.size()) + 3 * int(object_points_var.size());
  }

  /// Column offset of a named variable block inside this node (pose first,
  /// then wall points, then object points, each map in key order).
  int block_offset(const std::string& id, bool is_object_point) const {
    int off = 6;
    if (!is_object_point) {
      for (const auto& [k, v] : wall_points) {
        if (k == id) return off;
        off += 3;
      }
      throw DataError("unknown wall point variable '" + id + "'");
    }
    off += 3 * int(wall_points.size());
    for (const auto& [k, v] : object_points_var) {
      if (k == id) return off;
      off += 3;
    }
    throw DataError("unknown object point variable '" + id + "'");
  }

  VecX to_vector() const {
    VecX v(dim());
    v.head<6>() = pose.to_vec();
    int off = 6;
    for (const auto& [k, p] : wall_points) {
      v.segment<3>(off) = p;
      off += 3;
    }
    for (const auto& [k, p] : object_points_var) {
      v.segment<3>(off) = p;
      off += 3;
    }
    return v;
  }

  /// Applies a chart update: vector addition with angle wrapping on the pose.
  TimestepState plus(const Eigen::Ref<const VecX>& delta) const {
    TimestepState out = *this;
    out.pose = pose_plus(pose, delta.head<6>());
    int off = 6;
    for (auto& [k, p] : out.wall_points) {
      p += delta.segment<3>(off);
      off += 3;
    }
    for (auto& [k, p] : out.object_points_var) {
      p += delta.segment<3>(off);
      off += 3;
    }
    return out;
  }

  /// Human-readable name of one scalar variable, for singularity diagnostics.
  std::string variable_name(int local_col) const {
    static const char* pose_names[6] = {"x", "y", "z", "roll", "pitch", "yaw"};
    static const char* axis[3] = {"x", "y", "z"};
    if (local_col < 6) return std::string("pose.") + pose_names[local_col];
    int off = 6;
    for (const auto& [k, v] : wall_points) {
      if (local_col < off + 3) return "wall point " + k + "." + axis[local_col - off];
      off += 3;
    }
    for (const auto& [k, v] : object_points_var) {
      if (local_col < off + 3) return "object point " + k + "." + axis[local_col - off];
      off += 3;
    }
    return "var" + std::to_string(local_col);
  }
};

}  // namespace inseam
