#pragma once

// Randomized smoothing problems with the structure of real trials: a chain of
// timestep states carrying wall/object contact points, V/M/Q/L factors
// throughout, and C factors on the near-contact stretch of the trajectory.
// Point variables on contact ticks are initialized near the contact geometry,
// the way a propagating estimator would initialize them.

#include <random>
#include <vector>

#include "inseam/factor/builders.hpp"

namespace inseam_test {

using namespace inseam;

struct RandomGraphProblem {
  std::vector<TimestepState> init;  // node initializations (shared by impl and oracle)
  std::vector<FactorSpec> factors;  // factor list in arrival order
  std::vector<std::vector<int>> factors_per_node;  // indices into `factors`
};

inline double pairing_distance_at(const SceneConfig& scene, const Pose6& pose,
                                  const Pairing& pairing) {
  const WallPointSpec& wp = scene.walls.wall_points.at(pairing.second);
  return inseam::detail::pairing_distance(pose, scene.shape, scene.walls, pairing.first, wp);
}

/// Object-frame location of the contact feature point for a pairing: the
/// fixed corner, or the rim point closest to the paired wall edge.
inline Vec3 object_feature_point(const SceneConfig& scene, const Pose6& pose,
                                 const Pairing& pairing) {
  const ObjectPointSpec& spec = scene.shape.object_points.at(pairing.first);
  if (!spec.on_feature) return spec.position;
  const WallPointSpec& wp = scene.walls.wall_points.at(pairing.second);
  LineSegment3 edge = scene.walls.inner_edge(wp.side);
  double best = std::numeric_limits<double>::infinity();
  Vec3 best_rim = spec.position;
  for (int i = 0; i < 360; ++i) {
    double u = 2.0 * M_PI * i / 360;
    Vec3 rim(scene.shape.semi_axis_x() * std::cos(u),
             scene.shape.semi_axis_y() * std::sin(u), 0.0);
    Vec3 w = transform_point(pose, rim);
    double d = (w - closest_point_on_segment(w, edge)).norm();
    if (d < best) {
      best = d;
      best_rim = rim;
    }
  }
  return best_rim;
}

inline RandomGraphProblem make_random_problem(const SceneConfig& scene, int num_nodes,
                                              std::uint64_t seed, double vision_drop = 0.1,
                                              double contact_prob = 0.7) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> offd(-0.012, 0.012);
  std::uniform_real_distribution<double> yawd(-0.25, 0.25);

  RandomGraphProblem p;
  // a descent-like trajectory: starts above the walls, dips to the top plane
  double offset = offd(rng), yaw = yawd(rng);
  double z0 = 0.006, z1 = -0.0005;
  Pose6 truth(offset, 0.001, z0, 0.0, 0.0, yaw);
  Pose6 robot_prev = truth;
  for (int t = 0; t < num_nodes; ++t) {
    Vec6 step;
    double dz = (z1 - z0) / std::max(1, num_nodes - 1);
    step << 0.3e-3 * n01(rng), 0.3e-3 * n01(rng), dz + 0.1e-3 * n01(rng), 0.001 * n01(rng),
        0.001 * n01(rng), 0.002 * n01(rng);
    if (t > 0) truth = pose_plus(truth, step);
    Pose6 robot_curr = truth;  // robot consistent with truth (noise enters via omegas)

    // pick the contact formation (if any) before building the state so the
    // point variables can be seeded near the contact geometry
    int contact_cf = -1;
    if (u01(rng) < contact_prob) {
      double best_d = 6e-3;
      for (const auto& cf : scene.registry.cfs) {
        if (cf.pairings.empty()) continue;
        double worst = 0.0;
        for (const auto& pairing : cf.pairings) {
          worst = std::max(worst, pairing_distance_at(scene, truth, pairing));
        }
        if (worst < best_d) {
          best_d = worst;
          contact_cf = cf.cf_id;
        }
      }
    }

    TimestepState st = make_state(scene, truth, double(t) * 0.1);
    for (auto& [id, q] : st.wall_points) {
      q += Vec3(1e-3 * n01(rng), 4e-3 * n01(rng), 1e-3 * n01(rng));
    }
    for (auto& [id, q] : st.object_points_var) {
      q += Vec3(1e-3 * n01(rng), 1e-3 * n01(rng), 0.5e-3 * n01(rng));
    }
    if (contact_cf > 0) {
      for (const auto& pairing : cf_constraint_pairs(contact_cf, scene.registry)) {
        Vec3 qo = object_feature_point(scene, truth, pairing);
        if (scene.shape.object_points.at(pairing.first).on_feature) {
          st.object_points_var[pairing.first] =
              qo + Vec3(0.5e-3 * n01(rng), 0.5e-3 * n01(rng), 0.2e-3 * n01(rng));
        }
        st.wall_points[pairing.second] =
            transform_point(truth, qo) + Vec3(0.5e-3 * n01(rng), 0.5e-3 * n01(rng), 0.2e-3 * n01(rng));
      }
    }
    TimestepState init = st;
    init.pose = pose_plus(truth, (Vec6() << 1e-3 * n01(rng), 1e-3 * n01(rng), 1e-3 * n01(rng),
                                  0.003 * n01(rng), 0.003 * n01(rng), 0.003 * n01(rng))
                                     .finished());
    p.init.push_back(init);
    p.factors_per_node.emplace_back();
    auto push = [&](FactorSpec f) {
      p.factors_per_node.back().push_back(int(p.factors.size()));
      p.factors.push_back(std::move(f));
    };

    if (u01(rng) > vision_drop) {
      Pose6 vis = pose_plus(truth, (Vec6() << 3e-3 * n01(rng), 3e-3 * n01(rng), 3e-3 * n01(rng),
                                    0.017 * n01(rng), 0.017 * n01(rng), 0.017 * n01(rng))
                                       .finished());
      push(make_v_factor(t, vis, scene.weights));
    }
    if (t > 0) {
      push(make_m_factor(t - 1, t, robot_prev, robot_curr, scene.weights));
    }
    for (const auto& [id, wp] : scene.walls.wall_points) {
      push(make_q_factor(t, id, false, wp.nominal, scene.weights));
      push(make_l_wall_factor(t, id, scene.walls, scene.weights));
    }
    for (const auto& [id, op] : scene.shape.object_points) {
      if (!op.on_feature) continue;
      push(make_q_factor(t, id, true, op.position, scene.weights));
      push(make_l_object_factor(t, id, scene.shape, scene.weights));
    }
    if (contact_cf > 0) {
      for (auto& f : make_c_factors(t, contact_cf, scene)) push(std::move(f));
    }
    robot_prev = robot_curr;
  }
  return p;
}

}  // namespace inseam_test
