#pragma once

#include "inseam/factor/factor.hpp"
#include "inseam/geometry/config.hpp"

namespace inseam {

inline Mat6 pose_noise(double sigma_trans, double sigma_rot) {
  Vec6 d;
  d << sigma_trans, sigma_trans, sigma_trans, sigma_rot, sigma_rot, sigma_rot;
  return d.cwiseProduct(d).asDiagonal();
}

inline Mat3 point_noise(double sigma) { return Mat3::Identity() * sigma * sigma; }

inline FactorSpec make_v_factor(int node, const Pose6& vision, const EstimatorWeights& w) {
  FactorSpec f;
  f.kind = FactorKind::V;
  f.node_ids = {node};
  f.vision = vision;
  f.omega = pose_noise(w.v_trans, w.v_rot);
  return f;
}

inline FactorSpec make_m_factor(int node_prev, int node_curr, const Pose6& robot_prev,
                                const Pose6& robot_curr, const EstimatorWeights& w) {
  FactorSpec f;
  f.kind = FactorKind::M;
  f.node_ids = {node_prev, node_curr};
  f.robot_prev = robot_prev;
  f.robot_curr = robot_curr;
  f.omega = pose_noise(w.m_trans, w.m_rot);
  return f;
}

inline FactorSpec make_q_factor(int node, const std::string& point_id, bool is_object,
                                const Vec3& nominal, const EstimatorWeights& w) {
  FactorSpec f;
  f.kind = FactorKind::Q;
  f.node_ids = {node};
  f.point_id = point_id;
  f.point_is_object = is_object;
  f.nominal = nominal;
  f.omega = point_noise(w.q_sigma);
  return f;
}

inline FactorSpec make_l_wall_factor(int node, const std::string& wall_point_id,
                                     const WallModel& walls, const EstimatorWeights& w) {
  FactorSpec f;
  f.kind = FactorKind::L;
  f.node_ids = {node};
  f.point_id = wall_point_id;
  f.point_is_object = false;
  f.feature = FeatureType::Segment;
  f.segment_feature = walls.inner_edge(walls.wall_points.at(wall_point_id).side);
  f.omega = point_noise(w.l_sigma);
  return f;
}

inline FactorSpec make_l_object_factor(int node, const std::string& object_point_id,
                                       const ObjectShape& shape, const EstimatorWeights& w) {
  FactorSpec f;
  f.kind = FactorKind::L;
  f.node_ids = {node};
  f.point_id = object_point_id;
  f.point_is_object = true;
  f.feature = FeatureType::Ellipse;
  f.ellipse_ax = shape.semi_axis_x();
  f.ellipse_ay = shape.semi_axis_y();
  f.omega = point_noise(w.l_sigma);
  return f;
}

/// One C factor per pairing of the given CF. CF 0 has no pairings and cannot
/// produce contact factors.
inline std::vector<FactorSpec> make_c_factors(int node, int cf_id, const SceneConfig& scene) {
  const auto pairings = cf_constraint_pairs(cf_id, scene.registry);
  if (pairings.empty()) {
    throw DataError("contact formation " + std::to_string(cf_id) +
                    " has no pairings; contact factors would be empty");
  }
  std::vector<FactorSpec> out;
  for (const auto& [obj_id, wall_id] : pairings) {
    FactorSpec f;
    f.kind = FactorKind::C;
    f.node_ids = {node};
    f.object_point_id = obj_id;
    f.wall_point_id = wall_id;
    const ObjectPointSpec& spec = scene.shape.object_points.at(obj_id);
    f.object_point_is_variable = spec.on_feature;
    f.fixed_object_point = spec.position;
    f.omega = point_noise(scene.weights.c_sigma);
    out.push_back(f);
  }
  return out;
}

/// Blank per-tick state for a scene: wall points at their nominals, on-feature
/// object points at their seeds.
inline TimestepState make_state(const SceneConfig& scene, const Pose6& pose, double t) {
  TimestepState s;
  s.pose = pose;
  s.timestamp = t;
  for (const auto& [id, wp] : scene.walls.wall_points) s.wall_points[id] = wp.nominal;
  for (const auto& [id, op] : scene.shape.object_points) {
    if (op.on_feature) s.object_points_var[id] = op.position;
  }
  return s;
}

}  // namespace inseam
