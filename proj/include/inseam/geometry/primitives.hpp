#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "inseam/geometry/pose.hpp"

namespace inseam {

struct LineSegment3 {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();

  LineSegment3() = default;
  LineSegment3(const Vec3& a_, const Vec3& b_) : a(a_), b(b_) {}

  Vec3 direction() const { return b - a; }
  Vec3 point_at(double t) const { return a + t * (b - a); }
};

/// Closest point on the segment to p (projection clamped to the endpoints).
inline Vec3 closest_point_on_segment(const Vec3& p, const LineSegment3& seg) {
  Vec3 d = seg.direction();
  double len2 = d.squaredNorm();
  if (len2 <= 0.0) return seg.a;
  double t = std::clamp((p - seg.a).dot(d) / len2, 0.0, 1.0);
  return seg.point_at(t);
}

/// Closest pair of points between two segments. Returns (on_a, on_b).
/// Standard clamped quadratic minimization; degenerate (parallel) cases fall
/// back to endpoint projections.
inline std::pair<Vec3, Vec3> closest_points_segment_segment(const LineSegment3& sa,
                                                            const LineSegment3& sb) {
  Vec3 d1 = sa.direction(), d2 = sb.direction(), r = sa.a - sb.a;
  double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 1e-18 && e <= 1e-18) {
    return {sa.a, sb.a};
  }
  if (a <= 1e-18) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    double c = d1.dot(r);
    if (e <= 1e-18) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      double b = d1.dot(d2);
      double denom = a * e - b * b;
      if (denom > 1e-18) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return {sa.point_at(s), sb.point_at(t)};
}

/// Closest point on the ellipse boundary {(ax cos u, ay sin u, 0)} (in the
/// plane frame) to a point p given in world coordinates. The point is first
/// projected into the plane; the boundary parameter is found by a coarse scan
/// followed by Newton iterations to |du| < 1e-10. A point at the ellipse
/// center maps deterministically to parameter 0.
inline Vec3 closest_point_on_ellipse(const Vec3& p, double ax, double ay,
                                     const Pose6& plane_pose) {
  Vec3 local = plane_pose.rotation().transpose() * (p - plane_pose.translation());
  double px = local.x(), py = local.y();

  double u;
  if (std::hypot(px, py) < 1e-12) {
    u = 0.0;
  } else {
    // coarse scan for the global minimum basin
    int best_k = 0;
    double best_d = std::numeric_limits<double>::infinity();
    constexpr int kScan = 64;
    for (int k = 0; k < kScan; ++k) {
      double uk = 2.0 * M_PI * k / kScan;
      double dx = ax * std::cos(uk) - px, dy = ay * std::sin(uk) - py;
      double d = dx * dx + dy * dy;
      if (d < best_d) {
        best_d = d;
        best_k = k;
      }
    }
    u = 2.0 * M_PI * best_k / kScan;
    // Newton on g(u) = d/du 0.5*|(ax cos u - px, ay sin u - py)|^2
    for (int it = 0; it < 100; ++it) {
      double cu = std::cos(u), su = std::sin(u);
      double g = (ay * ay - ax * ax) * su * cu + ax * px * su - ay * py * cu;
      double dg = (ay * ay - ax * ax) * (cu * cu - su * su) + ax * px * cu + ay * py * su;
      if (std::abs(dg) < 1e-18) break;
      double du = g / dg;
      u -= du;
      if (std::abs(du) < 1e-10) break;
    }
  }
  Vec3 on_curve(ax * std::cos(u), ay * std::sin(u), 0.0);
  return plane_pose.rotation() * on_curve + plane_pose.translation();
}

}  // namespace inseam
