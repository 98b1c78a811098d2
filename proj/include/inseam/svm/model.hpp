#pragma once

#include <fstream>
#include <numeric>

#include "inseam/svm/dataset.hpp"
#include "inseam/svm/smo.hpp"

namespace inseam {

/// One-vs-one multiclass RBF-kernel SVM. Support vectors are stored once,
/// deduplicated across the pairwise machines; each machine references them by
/// index with its dual coefficient (alpha * y).
struct SvmModel {
  int version = 1;
  double c_box = 10.0;
  double gamma = 1.0;
  std::vector<int> labels;  // sorted ascending
  Standardization standardization;
  Eigen::Matrix<double, 6, Eigen::Dynamic> support_vectors;  // standardized features

  struct Machine {
    int label_a = 0, label_b = 0;  // a < b; decision > 0 votes a
    std::vector<int> sv_index;
    std::vector<double> coef;  // alpha * y
    double rho = 0.0;
    bool converged = true;
  };
  std::vector<Machine> machines;

  std::int64_t total_kernel_evaluations = 0;
};

struct SvmTrainOptions {
  double kkt_tol = 1e-3;
  std::int64_t max_kernel_evals_per_machine = 10000000;
  std::size_t cache_bytes = 64ull << 20;
};

namespace svm_detail {

/// Canonical presentation order: by label, then features lexicographically.
/// Training is deterministic in the multiset of samples, independent of the
/// order they arrived in.
inline std::vector<int> canonical_order(const CfDataset& data) {
  std::vector<int> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (data.labels[a] != data.labels[b]) return data.labels[a] < data.labels[b];
    for (int k = 0; k < 6; ++k) {
      if (data.features[a][k] != data.features[b][k]) {
        return data.features[a][k] < data.features[b][k];
      }
    }
    return false;
  });
  return idx;
}

}  // namespace svm_detail

inline SvmModel train_svm(const CfDataset& raw, double c_box, double gamma,
                          const SvmTrainOptions& opts = {}) {
  if (c_box <= 0 || gamma <= 0) throw UsageError("SVM requires C > 0 and gamma > 0");
  if (raw.size() < 2) throw DataError("training needs at least 2 samples");
  SvmModel model;
  model.c_box = c_box;
  model.gamma = gamma;
  model.labels = raw.distinct_labels();
  if (model.labels.size() < 2) throw DataError("training needs at least 2 distinct labels");
  model.standardization = compute_standardization(raw);
  CfDataset data = standardize(raw, model.standardization);

  std::vector<int> order = svm_detail::canonical_order(data);

  // index samples per label in canonical order
  std::vector<std::vector<int>> by_label(model.labels.size());
  auto label_slot = [&](int label) {
    return int(std::lower_bound(model.labels.begin(), model.labels.end(), label) -
               model.labels.begin());
  };
  for (int idx : order) by_label[label_slot(data.labels[idx])].push_back(idx);

  // global support-vector dedup table
  std::vector<int> global_sv_of_sample(data.size(), -1);
  std::vector<int> sv_samples;

  for (std::size_t a = 0; a < model.labels.size(); ++a) {
    for (std::size_t b = a + 1; b < model.labels.size(); ++b) {
      const auto& ia = by_label[a];
      const auto& ib = by_label[b];
      int n = int(ia.size() + ib.size());
      Eigen::Matrix<double, 6, Eigen::Dynamic> x(6, n);
      std::vector<double> y(n);
      std::vector<int> sample_of(n);
      for (int k = 0; k < int(ia.size()); ++k) {
        x.col(k) = data.features[ia[k]];
        y[k] = 1.0;
        sample_of[k] = ia[k];
      }
      for (int k = 0; k < int(ib.size()); ++k) {
        x.col(int(ia.size()) + k) = data.features[ib[k]];
        y[int(ia.size()) + k] = -1.0;
        sample_of[int(ia.size()) + k] = ib[k];
      }
      RbfKernel kernel(x, gamma, opts.cache_bytes);
      SmoResult res = solve_smo(kernel, y, c_box, opts.kkt_tol,
                                opts.max_kernel_evals_per_machine);
      model.total_kernel_evaluations += res.kernel_evaluations;

      SvmModel::Machine m;
      m.label_a = model.labels[a];
      m.label_b = model.labels[b];
      m.rho = res.rho;
      m.converged = res.converged;
      for (int k = 0; k < n; ++k) {
        if (res.alpha[k] <= 0.0) continue;
        int sample = sample_of[k];
        if (global_sv_of_sample[sample] < 0) {
          global_sv_of_sample[sample] = int(sv_samples.size());
          sv_samples.push_back(sample);
        }
        m.sv_index.push_back(global_sv_of_sample[sample]);
        m.coef.push_back(res.alpha[k] * y[k]);
      }
      model.machines.push_back(std::move(m));
    }
  }

  model.support_vectors.resize(6, int(sv_samples.size()));
  for (std::size_t k = 0; k < sv_samples.size(); ++k) {
    model.support_vectors.col(int(k)) = data.features[sv_samples[k]];
  }
  return model;
}

/// Majority vote over the pairwise machines; vote ties resolve to the lowest
/// CF id.
inline int predict(const SvmModel& model, const Wrench6& w) {
  Vec6 x = model.standardization.apply(w.to_vec());
  // kernel against the deduplicated support vectors, evaluated once
  VecX k;
  if (model.support_vectors.cols() > 0) {
    VecX d2 = (model.support_vectors.colwise().squaredNorm().transpose().array() +
               x.squaredNorm() -
               2.0 * (model.support_vectors.transpose() * x).array());
    k = (-model.gamma * d2.array()).exp();
  }
  std::vector<int> votes(model.labels.size(), 0);
  auto label_slot = [&](int label) {
    return int(std::lower_bound(model.labels.begin(), model.labels.end(), label) -
               model.labels.begin());
  };
  for (const auto& m : model.machines) {
    double f = -m.rho;
    for (std::size_t t = 0; t < m.sv_index.size(); ++t) {
      f += m.coef[t] * k[m.sv_index[t]];
    }
    ++votes[label_slot(f > 0 ? m.label_a : m.label_b)];
  }
  int best = 0;
  for (std::size_t s = 1; s < votes.size(); ++s) {
    if (votes[s] > votes[best]) best = int(s);  // ties keep the lowest label
  }
  return model.labels[best];
}

// ---- serialization ---------------------------------------------------------

inline Json svm_to_json(const SvmModel& model) {
  Json j;
  j["schema_version"] = model.version;
  j["kernel"] = "rbf";
  j["C"] = model.c_box;
  j["gamma"] = model.gamma;
  j["labels"] = model.labels;
  Json stats;
  stats["mean"] = std::vector<double>(model.standardization.mean.data(),
                                      model.standardization.mean.data() + 6);
  stats["std"] = std::vector<double>(model.standardization.std.data(),
                                     model.standardization.std.data() + 6);
  j["standardization"] = stats;
  Json svs = Json::array();
  for (int c = 0; c < model.support_vectors.cols(); ++c) {
    Json v = Json::array();
    for (int r = 0; r < 6; ++r) v.push_back(model.support_vectors(r, c));
    svs.push_back(v);
  }
  j["support_vectors"] = svs;
  Json ms = Json::array();
  for (const auto& m : model.machines) {
    Json mj;
    mj["label_a"] = m.label_a;
    mj["label_b"] = m.label_b;
    mj["rho"] = m.rho;
    mj["converged"] = m.converged;
    mj["sv_index"] = m.sv_index;
    mj["coef"] = m.coef;
    ms.push_back(mj);
  }
  j["machines"] = ms;
  return j;
}

inline SvmModel svm_from_json(const Json& j) {
  SvmModel model;
  try {
    model.version = j.at("schema_version").get<int>();
    if (model.version != 1) throw DataError("unsupported model schema_version");
    if (j.at("kernel").get<std::string>() != "rbf") throw DataError("unsupported kernel");
    model.c_box = j.at("C").get<double>();
    model.gamma = j.at("gamma").get<double>();
    model.labels = j.at("labels").get<std::vector<int>>();
    auto mean = j.at("standardization").at("mean").get<std::vector<double>>();
    auto std = j.at("standardization").at("std").get<std::vector<double>>();
    for (int i = 0; i < 6; ++i) {
      model.standardization.mean[i] = mean.at(i);
      model.standardization.std[i] = std.at(i);
    }
    const Json& svs = j.at("support_vectors");
    model.support_vectors.resize(6, int(svs.size()));
    for (int c = 0; c < int(svs.size()); ++c) {
      for (int r = 0; r < 6; ++r) model.support_vectors(r, c) = svs[c][r].get<double>();
    }
    for (const auto& mj : j.at("machines")) {
      SvmModel::Machine m;
      m.label_a = mj.at("label_a").get<int>();
      m.label_b = mj.at("label_b").get<int>();
      m.rho = mj.at("rho").get<double>();
      m.converged = mj.at("converged").get<bool>();
      m.sv_index = mj.at("sv_index").get<std::vector<int>>();
      m.coef = mj.at("coef").get<std::vector<double>>();
      if (m.sv_index.size() != m.coef.size()) throw DataError("machine sv/coef mismatch");
      model.machines.push_back(std::move(m));
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("svm model: ") + e.what());
  }
  return model;
}

inline void save_svm(const SvmModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << svm_to_json(model).dump(1) << "\n";
}

inline SvmModel load_svm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw DataError(std::string("model parse error in ") + path + ": " + e.what());
  }
  return svm_from_json(j);
}

}  // namespace inseam
