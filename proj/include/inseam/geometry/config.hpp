#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "inseam/geometry/registry.hpp"

namespace inseam {

/// Per-frame vision corruption model.
struct VisionNoiseSpec {
  double translation_std = 3e-3;   // m
  double rotation_std = 1.0 * M_PI / 180.0;
  double dropout_prob = 0.05;
  double outlier_prob = 0.01;
  double outlier_translation = 30e-3;  // m, uniform gross error magnitude
  double outlier_rotation = 10.0 * M_PI / 180.0;
  int latency_frames = 2;
};

/// Suction-cup spring and contact stiffness used by the trial generator.
struct ComplianceModel {
  Vec3 k_translation{2000.0, 2000.0, 5000.0};  // N/m
  Vec3 k_rotation{3.0, 3.0, 6.0};              // N*m/rad
  double k_contact = 10000.0;                  // N/m
  Vec6 wrench_noise_std = (Vec6() << 0.05, 0.05, 0.05, 0.002, 0.002, 0.002).finished();
};

/// Estimator noise sigmas (diagonal Omega roots), identified against the
/// simulator's injected noise.
struct EstimatorWeights {
  double v_trans = 3e-3, v_rot = 1.0 * M_PI / 180.0;
  double m_trans = 0.5e-3, m_rot = 2.0 * M_PI / 180.0;  // rotation inflated for cup compliance
  double c_sigma = 1e-3;
  double l_sigma = 1e-3;
  double q_sigma = 30e-3;
};

/// Trial-generation defaults shared by a scene.
struct SimDefaults {
  double descent_speed = 0.005;     // m/s
  double robot_rate = 250.0;        // Hz
  double vision_rate = 30.0;        // Hz
  double estimator_rate = 10.0;     // Hz
  double contact_force_stop = 2.0;  // N
  double start_height = 0.014;      // m above the wall top plane
  bool retreat = true;
};

/// Everything that defines one experimental scene: geometry, registry,
/// noise models, and estimator weights. Loaded from a JSON config file;
/// rect and ellip ship as versioned defaults.
struct SceneConfig {
  int schema_version = 1;
  std::string name;  // "rect" | "ellip" | custom
  ObjectShape shape;
  WallModel walls;
  CfRegistry registry;
  double label_tol = 5e-3;  // sidecar ground-truth labeling tolerance
  VisionNoiseSpec vision;
  ComplianceModel compliance;
  EstimatorWeights weights;
  SimDefaults sim;
};

// ---- JSON serialization -------------------------------------------------

inline Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw DataError("expected 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline Json scene_to_json(const SceneConfig& s) {
  Json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;

  Json obj;
  obj["kind"] = s.shape.kind == ShapeKind::Rect ? "rect" : "ellip";
  obj["width_x"] = s.shape.width_x;
  obj["depth_y"] = s.shape.depth_y;
  obj["height_z"] = s.shape.height_z;
  obj["mass_kg"] = s.shape.mass_kg;
  Json pts = Json::object();
  for (const auto& [id, spec] : s.shape.object_points) {
    Json p;
    p["on_feature"] = spec.on_feature;
    p["position"] = to_json(spec.position);
    pts[id] = p;
  }
  obj["points"] = pts;
  j["object"] = obj;

  Json w;
  w["slot_width_x"] = s.walls.slot_width_x;
  w["wall_top_width"] = s.walls.wall_top_width;
  w["wall_length_y"] = s.walls.wall_length_y;
  w["wall_height"] = s.walls.wall_height;
  w["floor_z"] = s.walls.floor_z;
  Json wpts = Json::object();
  for (const auto& [id, spec] : s.walls.wall_points) {
    Json p;
    p["side"] = spec.side == 0 ? "left" : "right";
    p["nominal"] = to_json(spec.nominal);
    wpts[id] = p;
  }
  w["points"] = wpts;
  j["walls"] = w;

  Json reg;
  reg["version"] = s.registry.version;
  Json cfs = Json::array();
  for (const auto& cf : s.registry.cfs) {
    Json c;
    c["id"] = cf.cf_id;
    c["name"] = cf.name;
    Json pr = Json::array();
    for (const auto& [o, wp] : cf.pairings) pr.push_back(Json::array({o, wp}));
    c["pairings"] = pr;
    cfs.push_back(c);
  }
  reg["formations"] = cfs;
  j["registry"] = reg;

  j["label_tol"] = s.label_tol;

  Json vn;
  vn["translation_std"] = s.vision.translation_std;
  vn["rotation_std"] = s.vision.rotation_std;
  vn["dropout_prob"] = s.vision.dropout_prob;
  vn["outlier_prob"] = s.vision.outlier_prob;
  vn["outlier_translation"] = s.vision.outlier_translation;
  vn["outlier_rotation"] = s.vision.outlier_rotation;
  vn["latency_frames"] = s.vision.latency_frames;
  j["vision_noise"] = vn;

  Json cm;
  cm["k_translation"] = to_json(s.compliance.k_translation);
  cm["k_rotation"] = to_json(s.compliance.k_rotation);
  cm["k_contact"] = s.compliance.k_contact;
  Json wn = Json::array();
  for (int i = 0; i < 6; ++i) wn.push_back(s.compliance.wrench_noise_std[i]);
  cm["wrench_noise_std"] = wn;
  j["compliance"] = cm;

  Json ew;
  ew["v_trans"] = s.weights.v_trans;
  ew["v_rot"] = s.weights.v_rot;
  ew["m_trans"] = s.weights.m_trans;
  ew["m_rot"] = s.weights.m_rot;
  ew["c_sigma"] = s.weights.c_sigma;
  ew["l_sigma"] = s.weights.l_sigma;
  ew["q_sigma"] = s.weights.q_sigma;
  j["estimator_weights"] = ew;

  Json sd;
  sd["descent_speed"] = s.sim.descent_speed;
  sd["robot_rate"] = s.sim.robot_rate;
  sd["vision_rate"] = s.sim.vision_rate;
  sd["estimator_rate"] = s.sim.estimator_rate;
  sd["contact_force_stop"] = s.sim.contact_force_stop;
  sd["start_height"] = s.sim.start_height;
  sd["retreat"] = s.sim.retreat;
  j["sim"] = sd;
  return j;
}

inline SceneConfig scene_from_json(const Json& j) {
  SceneConfig s;
  try {
    s.schema_version = j.at("schema_version").get<int>();
    if (s.schema_version != 1) {
      throw DataError("unsupported scene schema_version " +
                      std::to_string(s.schema_version));
    }
    s.name = j.at("name").get<std::string>();

    const Json& obj = j.at("object");
    std::string kind = obj.at("kind").get<std::string>();
    if (kind == "rect") {
      s.shape.kind = ShapeKind::Rect;
    } else if (kind == "ellip") {
      s.shape.kind = ShapeKind::Ellip;
    } else {
      throw DataError("unknown object kind '" + kind + "'");
    }
    s.shape.width_x = obj.at("width_x").get<double>();
    s.shape.depth_y = obj.at("depth_y").get<double>();
    s.shape.height_z = obj.at("height_z").get<double>();
    s.shape.mass_kg = obj.at("mass_kg").get<double>();
    if (s.shape.width_x <= 0 || s.shape.depth_y <= 0 || s.shape.height_z <= 0) {
      throw DataError("object dimensions must be positive");
    }
    s.shape.object_points.clear();
    for (auto it = obj.at("points").begin(); it != obj.at("points").end(); ++it) {
      ObjectPointSpec spec;
      spec.on_feature = it.value().at("on_feature").get<bool>();
      spec.position = vec3_from_json(it.value().at("position"));
      s.shape.object_points[it.key()] = spec;
    }

    const Json& w = j.at("walls");
    s.walls.slot_width_x = w.at("slot_width_x").get<double>();
    s.walls.wall_top_width = w.at("wall_top_width").get<double>();
    s.walls.wall_length_y = w.at("wall_length_y").get<double>();
    s.walls.wall_height = w.at("wall_height").get<double>();
    s.walls.floor_z = w.at("floor_z").get<double>();
    if (s.walls.slot_width_x <= 0) throw DataError("slot_width_x must be positive");
    s.walls.wall_points.clear();
    for (auto it = w.at("points").begin(); it != w.at("points").end(); ++it) {
      WallPointSpec spec;
      std::string side = it.value().at("side").get<std::string>();
      if (side == "left") {
        spec.side = 0;
      } else if (side == "right") {
        spec.side = 1;
      } else {
        throw DataError("wall point side must be 'left' or 'right'");
      }
      spec.nominal = vec3_from_json(it.value().at("nominal"));
      s.walls.wall_points[it.key()] = spec;
    }
    for (int side = 0; side < 2; ++side) {
      int n = 0;
      for (const auto& [id, spec] : s.walls.wall_points) {
        if (spec.side == side) ++n;
      }
      if (n != 2) throw DataError("each wall needs exactly 2 contact points");
    }

    const Json& reg = j.at("registry");
    s.registry.version = reg.at("version").get<int>();
    s.registry.cfs.clear();
    for (const auto& c : reg.at("formations")) {
      ContactFormationSpec cf;
      cf.cf_id = c.at("id").get<int>();
      cf.name = c.at("name").get<std::string>();
      for (const auto& pr : c.at("pairings")) {
        Pairing pairing{pr.at(0).get<std::string>(), pr.at(1).get<std::string>()};
        if (!s.shape.object_points.count(pairing.first)) {
          throw DataError("registry references unknown object point '" + pairing.first + "'");
        }
        if (!s.walls.wall_points.count(pairing.second)) {
          throw DataError("registry references unknown wall point '" + pairing.second + "'");
        }
        cf.pairings.push_back(pairing);
      }
      s.registry.cfs.push_back(cf);
    }
    std::sort(s.registry.cfs.begin(), s.registry.cfs.end(),
              [](const auto& a, const auto& b) { return a.cf_id < b.cf_id; });
    if (s.registry.cfs.empty() || s.registry.cfs.front().cf_id != 0 ||
        !s.registry.cfs.front().pairings.empty()) {
      throw DataError("registry must define CF 0 with no pairings");
    }

    s.label_tol = j.at("label_tol").get<double>();

    const Json& vn = j.at("vision_noise");
    s.vision.translation_std = vn.at("translation_std").get<double>();
    s.vision.rotation_std = vn.at("rotation_std").get<double>();
    s.vision.dropout_prob = vn.at("dropout_prob").get<double>();
    s.vision.outlier_prob = vn.at("outlier_prob").get<double>();
    s.vision.outlier_translation = vn.at("outlier_translation").get<double>();
    s.vision.outlier_rotation = vn.at("outlier_rotation").get<double>();
    s.vision.latency_frames = vn.at("latency_frames").get<int>();

    const Json& cm = j.at("compliance");
    s.compliance.k_translation = vec3_from_json(cm.at("k_translation"));
    s.compliance.k_rotation = vec3_from_json(cm.at("k_rotation"));
    s.compliance.k_contact = cm.at("k_contact").get<double>();
    for (int i = 0; i < 6; ++i) {
      s.compliance.wrench_noise_std[i] = cm.at("wrench_noise_std").at(i).get<double>();
    }

    const Json& ew = j.at("estimator_weights");
    s.weights.v_trans = ew.at("v_trans").get<double>();
    s.weights.v_rot = ew.at("v_rot").get<double>();
    s.weights.m_trans = ew.at("m_trans").get<double>();
    s.weights.m_rot = ew.at("m_rot").get<double>();
    s.weights.c_sigma = ew.at("c_sigma").get<double>();
    s.weights.l_sigma = ew.at("l_sigma").get<double>();
    s.weights.q_sigma = ew.at("q_sigma").get<double>();

    const Json& sd = j.at("sim");
    s.sim.descent_speed = sd.at("descent_speed").get<double>();
    s.sim.robot_rate = sd.at("robot_rate").get<double>();
    s.sim.vision_rate = sd.at("vision_rate").get<double>();
    s.sim.estimator_rate = sd.at("estimator_rate").get<double>();
    s.sim.contact_force_stop = sd.at("contact_force_stop").get<double>();
    s.sim.start_height = sd.at("start_height").get<double>();
    s.sim.retreat = sd.at("retreat").get<bool>();
  } catch (const Json::exception& e) {
    throw DataError(std::string("scene config: ") + e.what());
  }
  return s;
}

inline SceneConfig load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw DataError(std::string("config parse error in ") + path + ": " + e.what());
  }
  return scene_from_json(j);
}

/// FNV-1a hash of the canonical scene serialization; stamped into dataset
/// headers so estimators can confirm they were configured for the data.
inline std::string scene_hash(const SceneConfig& s) {
  std::string dump = scene_to_json(s).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// ---- Built-in scenes -----------------------------------------------------

/// Cuboid, 8x5x8 cm, 110 g. Bottom corners c1..c4 counterclockwise from
/// front-left; c1/c2 sit on the left (-x) bottom edge, c3/c4 on the right.
inline SceneConfig builtin_rect_scene() {
  SceneConfig s;
  s.name = "rect";
  s.shape.kind = ShapeKind::Rect;
  s.shape.width_x = 0.08;
  s.shape.depth_y = 0.05;
  s.shape.height_z = 0.08;
  s.shape.mass_kg = 0.110;
  double hx = 0.04, hy = 0.025;
  s.shape.object_points["c1"] = {false, {-hx, -hy, 0.0}};
  s.shape.object_points["c2"] = {false, {-hx, hy, 0.0}};
  s.shape.object_points["c3"] = {false, {hx, hy, 0.0}};
  s.shape.object_points["c4"] = {false, {hx, -hy, 0.0}};

  s.walls.slot_width_x = 0.084;
  s.walls.wall_top_width = 0.045;
  s.walls.wall_length_y = 0.155;
  s.walls.wall_height = 0.040;
  s.walls.floor_z = -0.008;
  double wx = s.walls.slot_width_x / 2.0;
  s.walls.wall_points["L1"] = {0, {-wx, 0.0, 0.0}};
  s.walls.wall_points["L2"] = {0, {-wx, 0.0, 0.0}};
  s.walls.wall_points["R1"] = {1, {wx, 0.0, 0.0}};
  s.walls.wall_points["R2"] = {1, {wx, 0.0, 0.0}};

  s.registry.version = 1;
  s.registry.cfs = {
      {0, "no contact", {}},
      {1, "corner c1 on left wall", {{"c1", "L1"}}},
      {2, "left edge flat on left wall", {{"c1", "L1"}, {"c2", "L2"}}},
      {3, "corner c2 on left wall", {{"c2", "L2"}}},
      {4, "corner c3 on right wall", {{"c3", "R1"}}},
      {5, "right edge flat on right wall", {{"c3", "R1"}, {"c4", "R2"}}},
      {6, "corner c4 on right wall", {{"c4", "R2"}}},
      {7, "corners c2+c4 straddle", {{"c2", "L2"}, {"c4", "R2"}}},
      {8, "corners c1+c3 straddle", {{"c1", "L1"}, {"c3", "R1"}}},
  };
  return s;
}

/// Elliptic cylinder bottom (semi-axes 4 x 2.5 cm), 100 g. The contact points
/// on the object are estimated variables confined to the bottom rim.
inline SceneConfig builtin_ellip_scene() {
  SceneConfig s = builtin_rect_scene();
  s.name = "ellip";
  s.shape.kind = ShapeKind::Ellip;
  s.shape.mass_kg = 0.100;
  s.shape.object_points.clear();
  // nominal seeds at the rim points nearest each wall
  s.shape.object_points["el"] = {true, {-0.04, 0.0, 0.0}};
  s.shape.object_points["er"] = {true, {0.04, 0.0, 0.0}};
  s.registry.version = 1;
  s.registry.cfs = {
      {0, "no contact", {}},
      {1, "rim on left wall", {{"el", "L1"}}},
      {2, "rim on right wall", {{"er", "R1"}}},
  };
  return s;
}

inline SceneConfig builtin_scene(const std::string& name) {
  if (name == "rect") return builtin_rect_scene();
  if (name == "ellip") return builtin_ellip_scene();
  throw UsageError("unknown built-in scene '" + name + "' (expected rect or ellip)");
}

}  // namespace inseam
