#pragma once

#include <Eigen/Cholesky>

#include <string>
#include <vector>

#include "inseam/factor/state.hpp"
#include "inseam/geometry/primitives.hpp"

namespace inseam {

enum class FactorKind { V, M, C, L, Q };

inline const char* factor_kind_name(FactorKind k) {
  switch (k) {
    case FactorKind::V: return "V";
    case FactorKind::M: return "M";
    case FactorKind::C: return "C";
    case FactorKind::L: return "L";
    case FactorKind::Q: return "Q";
  }
  return "?";
}

/// Which geometric feature an L factor ties its point to.
enum class FeatureType { Segment, Ellipse };

/// One cost term of the objective. V and M act on the pose; C, L, Q act on
/// contact point variables (C couples a point to the pose as well).
struct FactorSpec {
  FactorKind kind = FactorKind::V;
  std::vector<int> node_ids;  // M: {t-1, t}; all others: {t}

  // V payload
  Pose6 vision;

  // M payload: robot TCP poses at the two endpoints
  Pose6 robot_prev, robot_curr;

  // C payload: one (object point, wall point) pairing
  std::string object_point_id, wall_point_id;
  bool object_point_is_variable = false;
  Vec3 fixed_object_point = Vec3::Zero();  // used when the object point is a constant

  // L / Q payload
  std::string point_id;
  bool point_is_object = false;  // variable lives in the object frame (ellip rim points)
  FeatureType feature = FeatureType::Segment;
  LineSegment3 segment_feature;
  double ellipse_ax = 0.0, ellipse_ay = 0.0;
  Vec3 nominal = Vec3::Zero();  // Q: q-hat

  MatX omega;  // noise covariance, square, per-kind dimension

  int residual_dim() const {
    switch (kind) {
      case FactorKind::V:
      case FactorKind::M: return 6;
      default: return 3;
    }
  }
};

namespace factor_detail {

inline Vec3 l_feature_point(const FactorSpec& f, const Vec3& q) {
  if (f.feature == FeatureType::Segment) {
    return closest_point_on_segment(q, f.segment_feature);
  }
  return closest_point_on_ellipse(q, f.ellipse_ax, f.ellipse_ay, Pose6::identity());
}

}  // namespace factor_detail

/// Kind-specific residual. All angular subtractions are wrapped. L recomputes
/// the closest feature point from the current estimate.
inline VecX residual(const FactorSpec& f, const std::vector<const TimestepState*>& states) {
  switch (f.kind) {
    case FactorKind::V: {
      return pose_difference(states[0]->pose, f.vision);
    }
    case FactorKind::M: {
      Vec6 dp = pose_difference(states[1]->pose, states[0]->pose);
      Vec6 dr = pose_difference(f.robot_curr, f.robot_prev);
      Vec6 r = dp - dr;
      for (int i = 3; i < 6; ++i) r[i] = wrap_angle(r[i]);
      return r;
    }
    case FactorKind::C: {
      const TimestepState& x = *states[0];
      Vec3 qo = f.object_point_is_variable ? x.object_points_var.at(f.object_point_id)
                                           : f.fixed_object_point;
      Vec3 qw = x.wall_points.at(f.wall_point_id);
      return transform_point(x.pose, qo) - qw;
    }
    case FactorKind::L: {
      const TimestepState& x = *states[0];
      Vec3 q = f.point_is_object ? x.object_points_var.at(f.point_id)
                                 : x.wall_points.at(f.point_id);
      return q - factor_detail::l_feature_point(f, q);
    }
    case FactorKind::Q: {
      const TimestepState& x = *states[0];
      Vec3 q = f.point_is_object ? x.object_points_var.at(f.point_id)
                                 : x.wall_points.at(f.point_id);
      return q - f.nominal;
    }
  }
  throw NumericError("unreachable factor kind");
}

/// Jacobian blocks aligned with f.node_ids: each residual_dim x node_dim.
/// Analytic for V, M, Q and C; central finite differences (step 1e-7, with
/// the closest feature point treated as a function of the state) for L.
inline std::vector<MatX> jacobian(const FactorSpec& f,
                                  const std::vector<const TimestepState*>& states) {
  std::vector<MatX> blocks;
  switch (f.kind) {
    case FactorKind::V: {
      MatX j = MatX::Zero(6, states[0]->dim());
      j.leftCols<6>().setIdentity();
      blocks.push_back(j);
      break;
    }
    case FactorKind::M: {
      MatX j0 = MatX::Zero(6, states[0]->dim());
      j0.leftCols<6>() = -Mat6::Identity();
      MatX j1 = MatX::Zero(6, states[1]->dim());
      j1.leftCols<6>().setIdentity();
      blocks.push_back(j0);
      blocks.push_back(j1);
      break;
    }
    case FactorKind::C: {
      const TimestepState& x = *states[0];
      Vec3 qo = f.object_point_is_variable ? x.object_points_var.at(f.object_point_id)
                                           : f.fixed_object_point;
      MatX j = MatX::Zero(3, x.dim());
      j.block<3, 3>(0, 0).setIdentity();
      j.block<3, 3>(0, 3) = rotation_point_jacobian(x.pose, qo);
      j.block<3, 3>(0, x.block_offset(f.wall_point_id, false)) = -Mat3::Identity();
      if (f.object_point_is_variable) {
        j.block<3, 3>(0, x.block_offset(f.object_point_id, true)) = x.pose.rotation();
      }
      blocks.push_back(j);
      break;
    }
    case FactorKind::L: {
      const TimestepState& x = *states[0];
      Vec3 q = f.point_is_object ? x.object_points_var.at(f.point_id)
                                 : x.wall_points.at(f.point_id);
      MatX j = MatX::Zero(3, x.dim());
      const double h = 1e-7;
      int off = x.block_offset(f.point_id, f.point_is_object);
      for (int k = 0; k < 3; ++k) {
        Vec3 qp = q, qm = q;
        qp[k] += h;
        qm[k] -= h;
        Vec3 rp = qp - factor_detail::l_feature_point(f, qp);
        Vec3 rm = qm - factor_detail::l_feature_point(f, qm);
        j.block<3, 1>(0, off + k) = (rp - rm) / (2.0 * h);
      }
      blocks.push_back(j);
      break;
    }
    case FactorKind::Q: {
      const TimestepState& x = *states[0];
      MatX j = MatX::Zero(3, x.dim());
      j.block<3, 3>(0, x.block_offset(f.point_id, f.point_is_object)).setIdentity();
      blocks.push_back(j);
      break;
    }
  }
  return blocks;
}

/// Square root of omega^{-1}: rows are whitened as W * J, W * r.
inline MatX whitener(const MatX& omega) {
  if (omega.rows() != omega.cols()) throw DataError("omega must be square");
  if ((omega - omega.transpose()).cwiseAbs().maxCoeff() > 1e-9 * omega.cwiseAbs().maxCoeff()) {
    throw DataError("omega must be symmetric");
  }
  Eigen::LLT<MatX> llt(omega);
  if (llt.info() != Eigen::Success) throw DataError("omega must be positive definite");
  MatX l = llt.matrixL();
  return l.triangularView<Eigen::Lower>().solve(MatX::Identity(omega.rows(), omega.cols()));
}

inline double mahalanobis_cost(const FactorSpec& f, const VecX& r) {
  Eigen::LLT<MatX> llt(f.omega);
  VecX w = llt.matrixL().solve(r);
  return w.squaredNorm();
}

}  // namespace inseam
