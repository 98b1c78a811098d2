#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "inseam/geometry/shapes.hpp"

namespace inseam {

using Pairing = std::pair<std::string, std::string>;  // (object_point_id, wall_point_id)

struct ContactFormationSpec {
  int cf_id = 0;
  std::string name;
  std::vector<Pairing> pairings;  // empty for CF 0
};

/// Data-driven contact-formation registry: CF id -> point pairings.
/// The estimator, labeler, and classifier all key off this table, so swapping
/// the object geometry is a registry change, not a code change.
struct CfRegistry {
  int version = 1;
  std::vector<ContactFormationSpec> cfs;  // sorted by cf_id, ids dense from 0

  const ContactFormationSpec& find(int cf_id) const {
    for (const auto& cf : cfs) {
      if (cf.cf_id == cf_id) return cf;
    }
    throw DataError("unknown contact formation id " + std::to_string(cf_id));
  }

  bool contains(int cf_id) const {
    return std::any_of(cfs.begin(), cfs.end(),
                       [&](const auto& cf) { return cf.cf_id == cf_id; });
  }

  std::vector<int> ids() const {
    std::vector<int> out;
    out.reserve(cfs.size());
    for (const auto& cf : cfs) out.push_back(cf.cf_id);
    return out;
  }

  /// Union of all pairings referenced by any CF, deduplicated and ordered.
  std::vector<Pairing> candidate_pairs() const {
    std::set<Pairing> s;
    for (const auto& cf : cfs) {
      for (const auto& p : cf.pairings) s.insert(p);
    }
    return {s.begin(), s.end()};
  }

  /// Registry-derived neighborhood: two CFs are adjacent when one pairing set
  /// contains the other or they differ by a single pairing. These are the
  /// contact arrangements a trajectory moves between by gaining or losing one
  /// contact, which is where classifier confusion concentrates.
  bool adjacent(int a, int b) const {
    if (a == b) return false;
    std::set<Pairing> pa, pb;
    for (const auto& p : find(a).pairings) pa.insert(p);
    for (const auto& p : find(b).pairings) pb.insert(p);
    std::vector<Pairing> sym;
    std::set_symmetric_difference(pa.begin(), pa.end(), pb.begin(), pb.end(),
                                  std::back_inserter(sym));
    if (sym.size() <= 1) return true;
    return std::includes(pa.begin(), pa.end(), pb.begin(), pb.end()) ||
           std::includes(pb.begin(), pb.end(), pa.begin(), pa.end());
  }
};

/// Pairings for a CF, verbatim from the registry (empty for CF 0).
inline std::vector<Pairing> cf_constraint_pairs(int cf_id, const CfRegistry& registry) {
  return registry.find(cf_id).pairings;
}

namespace detail {

/// Distance from an object contact point (under `pose`) to the inner top edge
/// of the wall owning `wall_pt`. On-feature points use the closest point of
/// the whole bottom rim, since the contact locus on a smooth shape is not a
/// fixed vertex.
inline double pairing_distance(const Pose6& pose, const ObjectShape& shape,
                               const WallModel& walls, const std::string& obj_id,
                               const WallPointSpec& wall_pt) {
  LineSegment3 edge = walls.inner_edge(wall_pt.side);
  const ObjectPointSpec& spec = shape.object_points.at(obj_id);
  if (!spec.on_feature) {
    Vec3 w = transform_point(pose, spec.position);
    return (w - closest_point_on_segment(w, edge)).norm();
  }
  double best = std::numeric_limits<double>::infinity();
  constexpr int kRimSamples = 720;
  for (int i = 0; i < kRimSamples; ++i) {
    double u = 2.0 * M_PI * i / kRimSamples;
    Vec3 rim(shape.semi_axis_x() * std::cos(u), shape.semi_axis_y() * std::sin(u), 0.0);
    Vec3 w = transform_point(pose, rim);
    best = std::min(best, (w - closest_point_on_segment(w, edge)).norm());
  }
  return best;
}

}  // namespace detail

/// Ground-truth CF labeling oracle: finds all registry pairings whose object
/// point lies within `tol` of its wall inner edge and maps the active set to
/// a CF id. Edge-on-edge contact (both points of one wall side active) takes
/// precedence over single-point CFs; no active pairing labels 0.
inline int label_cf_groundtruth(const Pose6& true_pose, const ObjectShape& shape,
                                const WallModel& walls, const CfRegistry& registry,
                                double tol = 1.5e-3) {
  struct Active {
    Pairing pairing;
    double distance;
    int side;
  };
  std::vector<Active> active;
  for (const auto& pairing : registry.candidate_pairs()) {
    const WallPointSpec& wp = walls.wall_points.at(pairing.second);
    double d = detail::pairing_distance(true_pose, shape, walls, pairing.first, wp);
    if (d <= tol) active.push_back({pairing, d, wp.side});
  }
  if (active.empty()) return 0;

  auto set_of = [](const std::vector<Pairing>& v) {
    return std::set<Pairing>(v.begin(), v.end());
  };
  std::set<Pairing> active_set;
  for (const auto& a : active) active_set.insert(a.pairing);

  // exact pairing-set match
  for (const auto& cf : registry.cfs) {
    if (!cf.pairings.empty() && set_of(cf.pairings) == active_set) return cf.cf_id;
  }

  // edge-on-edge precedence: a side with both of its points active
  int best_edge_cf = -1;
  double best_edge_d = std::numeric_limits<double>::infinity();
  for (int side = 0; side < 2; ++side) {
    std::set<Pairing> side_pairs;
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& a : active) {
      if (a.side == side) {
        side_pairs.insert(a.pairing);
        dmin = std::min(dmin, a.distance);
      }
    }
    if (side_pairs.size() < 2) continue;
    for (const auto& cf : registry.cfs) {
      if (!cf.pairings.empty() && set_of(cf.pairings) == side_pairs && dmin < best_edge_d) {
        best_edge_cf = cf.cf_id;
        best_edge_d = dmin;
      }
    }
  }
  if (best_edge_cf >= 0) return best_edge_cf;

  // closest single pairing
  std::sort(active.begin(), active.end(), [](const Active& a, const Active& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.pairing < b.pairing;
  });
  for (const auto& a : active) {
    for (const auto& cf : registry.cfs) {
      if (cf.pairings.size() == 1 && cf.pairings.front() == a.pairing) return cf.cf_id;
    }
  }
  return 0;
}

/// Ground-truth contact point on the wall edge for one pairing: the closest
/// point on the inner top edge to the paired object feature.
inline Vec3 groundtruth_wall_contact_point(const Pose6& true_pose, const ObjectShape& shape,
                                           const WallModel& walls, const Pairing& pairing) {
  const WallPointSpec& wp = walls.wall_points.at(pairing.second);
  LineSegment3 edge = walls.inner_edge(wp.side);
  const ObjectPointSpec& spec = shape.object_points.at(pairing.first);
  if (!spec.on_feature) {
    Vec3 w = transform_point(true_pose, spec.position);
    return closest_point_on_segment(w, edge);
  }
  double best = std::numeric_limits<double>::infinity();
  Vec3 best_pt = edge.a;
  constexpr int kRimSamples = 720;
  for (int i = 0; i < kRimSamples; ++i) {
    double u = 2.0 * M_PI * i / kRimSamples;
    Vec3 rim(shape.semi_axis_x() * std::cos(u), shape.semi_axis_y() * std::sin(u), 0.0);
    Vec3 w = transform_point(true_pose, rim);
    Vec3 on_edge = closest_point_on_segment(w, edge);
    double d = (w - on_edge).norm();
    if (d < best) {
      best = d;
      best_pt = on_edge;
    }
  }
  return best_pt;
}

}  // namespace inseam
