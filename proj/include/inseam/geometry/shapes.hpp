#pragma once

#include <map>
#include <string>
#include <vector>

#include "inseam/geometry/primitives.hpp"

namespace inseam {

enum class ShapeKind { Rect, Ellip };

/// A named contact point on the object, expressed in the object frame.
/// Fixed points (rect bottom corners) are constants; on-feature points
/// (ellip bottom rim) are estimated variables constrained to the feature.
struct ObjectPointSpec {
  bool on_feature = false;       // false: fixed at `position`; true: on the bottom ellipse
  Vec3 position = Vec3::Zero();  // fixed position, or nominal seed for on-feature points
};

/// Object geometry. The object frame sits at the center of the bottom face,
/// x across the tight slot dimension, z up. The suction grip (TCP) attaches
/// at the top-face center, (0, 0, height_z).
struct ObjectShape {
  ShapeKind kind = ShapeKind::Rect;
  double width_x = 0.08;   // rect full width / ellip: 2*semi_axis_x
  double depth_y = 0.05;   // rect full depth / ellip: 2*semi_axis_y
  double height_z = 0.08;
  double mass_kg = 0.110;
  std::map<std::string, ObjectPointSpec> object_points;

  double semi_axis_x() const { return width_x / 2.0; }
  double semi_axis_y() const { return depth_y / 2.0; }
  Vec3 grasp_offset() const { return {0.0, 0.0, height_z}; }

  /// Bottom boundary sample points in the object frame (z = 0 rim).
  /// These are the candidate contact loci against the walls.
  std::vector<Vec3> bottom_boundary_samples(int per_edge = 9) const {
    std::vector<Vec3> pts;
    if (kind == ShapeKind::Rect) {
      double hx = width_x / 2.0, hy = depth_y / 2.0;
      // corners first, then interior samples of the two tight-side edges and
      // interior samples of the front/back edges (they can cross a wall top too)
      pts.push_back({-hx, -hy, 0.0});
      pts.push_back({-hx, hy, 0.0});
      pts.push_back({hx, hy, 0.0});
      pts.push_back({hx, -hy, 0.0});
      for (int i = 1; i < per_edge - 1; ++i) {
        double t = -hy + depth_y * i / (per_edge - 1);
        pts.push_back({-hx, t, 0.0});
        pts.push_back({hx, t, 0.0});
      }
      for (int i = 1; i < per_edge - 1; ++i) {
        double t = -hx + width_x * i / (per_edge - 1);
        pts.push_back({t, -hy, 0.0});
        pts.push_back({t, hy, 0.0});
      }
    } else {
      int n = 48;
      for (int i = 0; i < n; ++i) {
        double u = 2.0 * M_PI * i / n;
        pts.push_back({semi_axis_x() * std::cos(u), semi_axis_y() * std::sin(u), 0.0});
      }
    }
    return pts;
  }

  /// Signed distance of a point (object frame) to the object solid;
  /// negative inside. Rect: box [−hx,hx]×[−hy,hy]×[0,h]. Ellip: the bottom
  /// portion is an elliptic cylinder; the SDF uses the scaled-radial bound,
  /// exact enough for shallow contact resolution.
  double sdf(const Vec3& p) const {
    if (kind == ShapeKind::Rect) {
      double hx = width_x / 2.0, hy = depth_y / 2.0;
      Vec3 q(std::abs(p.x()) - hx, std::abs(p.y()) - hy,
             std::abs(p.z() - height_z / 2.0) - height_z / 2.0);
      double outside = Vec3(std::max(q.x(), 0.0), std::max(q.y(), 0.0), std::max(q.z(), 0.0)).norm();
      double inside = std::min(std::max({q.x(), q.y(), q.z()}), 0.0);
      return outside + inside;
    }
    double rad = std::hypot(p.x() / semi_axis_x(), p.y() / semi_axis_y());
    double scale = std::min(semi_axis_x(), semi_axis_y());
    double dr = (rad - 1.0) * scale;
    double dz = std::max(-p.z(), p.z() - height_z);
    if (dr > 0.0 || dz > 0.0) {
      return std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
    }
    return std::max(dr, dz);
  }

  /// Outward SDF gradient (object frame), unit norm; central differences.
  Vec3 sdf_gradient(const Vec3& p) const {
    const double h = 1e-6;
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
      Vec3 dp = Vec3::Zero();
      dp[i] = h;
      g[i] = (sdf(p + dp) - sdf(p - dp)) / (2.0 * h);
    }
    double n = g.norm();
    return n > 1e-12 ? Vec3(g / n) : Vec3(0, 0, 1);
  }
};

/// A named contact point on a wall inner top edge.
struct WallPointSpec {
  int side = 0;                 // 0: left wall, 1: right wall
  Vec3 nominal = Vec3::Zero();  // q-hat, prior position on the edge
};

/// Two parallel rigid walls forming the slot. World frame: origin at the top
/// center of the slot, z up, x across the tight dimension, inner top edges
/// parallel to the y-axis. Walls are world-fixed (wall frame == world frame).
struct WallModel {
  double slot_width_x = 0.084;
  double wall_top_width = 0.045;   // top face extent outward from the inner edge
  double wall_length_y = 0.155;    // top face extent along the slot
  double wall_height = 0.040;      // walls extend down to z = -wall_height
  double floor_z = -0.008;         // container floor between the walls
  std::map<std::string, WallPointSpec> wall_points;

  LineSegment3 inner_edge(int side) const {
    double x = (side == 0 ? -1.0 : 1.0) * slot_width_x / 2.0;
    return LineSegment3({x, -wall_length_y / 2.0, 0.0}, {x, wall_length_y / 2.0, 0.0});
  }
  LineSegment3 left_edge() const { return inner_edge(0); }
  LineSegment3 right_edge() const { return inner_edge(1); }

  /// Signed distance (world frame) to the union of the two wall boxes and the
  /// floor half-space; negative inside.
  double sdf(const Vec3& p) const {
    auto box = [&](int side) {
      double x0 = slot_width_x / 2.0, x1 = slot_width_x / 2.0 + wall_top_width;
      double px = side == 0 ? -p.x() : p.x();
      double cx = (x0 + x1) / 2.0, hx = (x1 - x0) / 2.0;
      Vec3 q(std::abs(px - cx) - hx, std::abs(p.y()) - wall_length_y / 2.0,
             std::abs(p.z() + wall_height / 2.0) - wall_height / 2.0);
      double outside =
          Vec3(std::max(q.x(), 0.0), std::max(q.y(), 0.0), std::max(q.z(), 0.0)).norm();
      double inside = std::min(std::max({q.x(), q.y(), q.z()}), 0.0);
      return outside + inside;
    };
    double d = std::min(box(0), box(1));
    return std::min(d, p.z() - floor_z);
  }

  Vec3 sdf_gradient(const Vec3& p) const {
    const double h = 1e-6;
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
      Vec3 dp = Vec3::Zero();
      dp[i] = h;
      g[i] = (sdf(p + dp) - sdf(p - dp)) / (2.0 * h);
    }
    double n = g.norm();
    return n > 1e-12 ? Vec3(g / n) : Vec3(0, 0, 1);
  }

  /// Sample points along both inner top edges (for edge-vs-object contact).
  std::vector<Vec3> edge_samples(int per_edge = 33) const {
    std::vector<Vec3> pts;
    for (int side = 0; side < 2; ++side) {
      LineSegment3 e = inner_edge(side);
      for (int i = 0; i < per_edge; ++i) {
        pts.push_back(e.point_at(double(i) / (per_edge - 1)));
      }
    }
    return pts;
  }
};

}  // namespace inseam
