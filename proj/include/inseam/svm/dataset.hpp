#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "inseam/common.hpp"

namespace inseam {

/// Force-torque measurement at the TCP.
struct Wrench6 {
  double fx = 0, fy = 0, fz = 0, tx = 0, ty = 0, tz = 0;

  Vec6 to_vec() const {
    Vec6 v;
    v << fx, fy, fz, tx, ty, tz;
    return v;
  }
  static Wrench6 from_vec(const Vec6& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }
  bool is_finite() const { return to_vec().allFinite(); }
};

/// Labeled wrench samples for contact-formation classification.
struct CfDataset {
  std::vector<Vec6> features;
  std::vector<int> labels;

  std::size_t size() const { return features.size(); }

  std::vector<int> distinct_labels() const {
    std::vector<int> ls = labels;
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    return ls;
  }

  int count_of(int label) const {
    return int(std::count(labels.begin(), labels.end(), label));
  }
};

/// Per-feature mean / population-std transform. Features whose std falls
/// below the 1e-12 floor are constant and map to zero.
struct Standardization {
  Vec6 mean = Vec6::Zero();
  Vec6 std = Vec6::Ones();

  Vec6 apply(const Vec6& x) const {
    Vec6 out;
    for (int i = 0; i < 6; ++i) {
      out[i] = std[i] <= 1e-12 ? 0.0 : (x[i] - mean[i]) / std[i];
    }
    return out;
  }
};

inline Standardization compute_standardization(const CfDataset& data) {
  if (data.size() < 2) throw DataError("standardization needs at least 2 samples");
  Standardization s;
  s.mean.setZero();
  for (const auto& x : data.features) s.mean += x;
  s.mean /= double(data.size());
  Vec6 var = Vec6::Zero();
  for (const auto& x : data.features) var += (x - s.mean).cwiseAbs2();
  var /= double(data.size());  // population variance
  s.std = var.cwiseSqrt();
  return s;
}

inline CfDataset standardize(const CfDataset& data, const Standardization& s) {
  CfDataset out;
  out.labels = data.labels;
  out.features.reserve(data.size());
  for (const auto& x : data.features) out.features.push_back(s.apply(x));
  return out;
}

// ---- CSV I/O (header: fx,fy,fz,tx,ty,tz,cf) -------------------------------

inline void write_dataset_csv(const CfDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "fx,fy,fz,tx,ty,tz,cf\n";
  out.precision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vec6& x = data.features[i];
    for (int k = 0; k < 6; ++k) out << x[k] << ',';
    out << data.labels[i] << '\n';
  }
}

inline CfDataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "fx,fy,fz,tx,ty,tz,cf") {
    throw DataError(path + ":1: expected header 'fx,fy,fz,tx,ty,tz,cf'");
  }
  CfDataset data;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    Vec6 x;
    std::string cell;
    for (int k = 0; k < 6; ++k) {
      if (!std::getline(ss, cell, ',')) {
        throw DataError(path + ":" + std::to_string(line_no) + ": expected 7 fields");
      }
      try {
        x[k] = std::stod(cell);
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (!std::getline(ss, cell, ',')) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 7 fields");
    }
    try {
      data.labels.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad label '" + cell + "'");
    }
    data.features.push_back(x);
  }
  return data;
}

}  // namespace inseam
