#pragma once

#include <random>
#include <tuple>

#include "inseam/geometry/registry.hpp"
#include "inseam/svm/model.hpp"

namespace inseam {

struct ConfusionMatrix {
  std::vector<int> labels;
  std::vector<std::vector<std::int64_t>> counts;  // counts[truth][pred]

  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& row : counts) {
      for (auto c : row) t += c;
    }
    return t;
  }
  std::int64_t diagonal() const {
    std::int64_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
  }
  double accuracy() const {
    std::int64_t n = total();
    return n == 0 ? 0.0 : double(diagonal()) / double(n);
  }
};

inline ConfusionMatrix confusion_matrix(const std::vector<int>& predictions,
                                        const std::vector<int>& truths,
                                        const std::vector<int>& labels) {
  if (predictions.size() != truths.size()) {
    throw DataError("confusion matrix needs equal-length prediction/truth lists");
  }
  ConfusionMatrix cm;
  cm.labels = labels;
  cm.counts.assign(labels.size(), std::vector<std::int64_t>(labels.size(), 0));
  auto slot = [&](int label) {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      throw DataError("label " + std::to_string(label) + " outside the label list");
    }
    return int(it - labels.begin());
  };
  for (std::size_t i = 0; i < truths.size(); ++i) {
    ++cm.counts[slot(truths[i])][slot(predictions[i])];
  }
  return cm;
}

/// Fraction of the misclassification mass on registry-adjacent CF pairs.
inline double adjacent_misclassification_share(const ConfusionMatrix& cm,
                                               const CfRegistry& registry) {
  std::int64_t off_total = 0, off_adjacent = 0;
  for (std::size_t i = 0; i < cm.labels.size(); ++i) {
    for (std::size_t j = 0; j < cm.labels.size(); ++j) {
      if (i == j) continue;
      off_total += cm.counts[i][j];
      if (registry.adjacent(cm.labels[i], cm.labels[j])) off_adjacent += cm.counts[i][j];
    }
  }
  return off_total == 0 ? 1.0 : double(off_adjacent) / double(off_total);
}

/// Deterministic stratified fold assignment (per-class seeded shuffle,
/// round-robin into folds). Returns fold index per sample.
inline std::vector<int> stratified_folds(const CfDataset& data, int folds,
                                         std::uint64_t seed) {
  if (folds < 2) throw UsageError("cross-validation needs folds >= 2");
  for (int label : data.distinct_labels()) {
    if (data.count_of(label) < folds) {
      throw DataError("fold count " + std::to_string(folds) +
                      " larger than smallest class (label " + std::to_string(label) + ": " +
                      std::to_string(data.count_of(label)) + " samples)");
    }
  }
  std::vector<int> assignment(data.size(), -1);
  std::vector<int> order = svm_detail::canonical_order(data);
  for (int label : data.distinct_labels()) {
    std::vector<int> members;
    for (int idx : order) {
      if (data.labels[idx] == label) members.push_back(idx);
    }
    std::mt19937_64 rng(mix_seed(seed, std::uint64_t(label) + 0x51));
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t k = 0; k < members.size(); ++k) {
      assignment[members[k]] = int(k % folds);
    }
  }
  return assignment;
}

struct GridPoint {
  double c_box;
  double gamma;
};

inline std::vector<GridPoint> default_grid() {
  std::vector<GridPoint> g;
  for (double c : {1.0, 10.0, 100.0}) {
    for (double gamma : {0.1, 1.0, 10.0}) g.push_back({c, gamma});
  }
  return g;
}

struct CrossValResult {
  double best_c = 0.0, best_gamma = 0.0, best_accuracy = 0.0;
  std::vector<std::tuple<double, double, double>> table;  // (C, gamma, accuracy)
};

/// Stratified k-fold accuracy of one (C, gamma) point.
inline double cv_accuracy(const CfDataset& data, int folds, double c_box, double gamma,
                          std::uint64_t seed, const SvmTrainOptions& opts = {}) {
  std::vector<int> assignment = stratified_folds(data, folds, seed);
  std::vector<double> fold_acc(folds, 0.0);
  parallel_for(folds, [&](int f) {
    CfDataset train, test;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (assignment[i] == f ? test : train).features.push_back(data.features[i]);
      (assignment[i] == f ? test : train).labels.push_back(data.labels[i]);
    }
    SvmModel model = train_svm(train, c_box, gamma, opts);
    std::int64_t hits = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (predict(model, Wrench6::from_vec(test.features[i])) == test.labels[i]) ++hits;
    }
    fold_acc[f] = test.size() == 0 ? 0.0 : double(hits) / double(test.size());
  });
  double mean = 0.0;
  for (double a : fold_acc) mean += a;
  return mean / folds;
}

/// Grid search by stratified k-fold; accuracy ties prefer smaller C, then
/// smaller gamma.
inline CrossValResult cross_validate(const CfDataset& data, int folds,
                                     const std::vector<GridPoint>& grid,
                                     std::uint64_t seed = 0,
                                     const SvmTrainOptions& opts = {}) {
  if (grid.empty()) throw UsageError("empty hyperparameter grid");
  CrossValResult result;
  std::vector<double> acc(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    acc[g] = cv_accuracy(data, folds, grid[g].c_box, grid[g].gamma, seed, opts);
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    result.table.emplace_back(grid[g].c_box, grid[g].gamma, acc[g]);
    bool better = acc[g] > result.best_accuracy;
    bool tie = acc[g] == result.best_accuracy &&
               (grid[g].c_box < result.best_c ||
                (grid[g].c_box == result.best_c && grid[g].gamma < result.best_gamma));
    if (g == 0 || better || tie) {
      result.best_accuracy = acc[g];
      result.best_c = grid[g].c_box;
      result.best_gamma = grid[g].gamma;
    }
  }
  return result;
}

/// Proportional stratified subsample of `size` samples (class frequencies
/// preserved, no rebalancing).
inline CfDataset stratified_subsample(const CfDataset& data, std::size_t size,
                                      std::uint64_t seed) {
  if (size >= data.size()) return data;
  std::vector<int> order = svm_detail::canonical_order(data);
  std::vector<int> picked;
  double frac = double(size) / double(data.size());
  for (int label : data.distinct_labels()) {
    std::vector<int> members;
    for (int idx : order) {
      if (data.labels[idx] == label) members.push_back(idx);
    }
    std::mt19937_64 rng(mix_seed(seed, std::uint64_t(label) + 0x1234));
    std::shuffle(members.begin(), members.end(), rng);
    std::size_t take = std::max<std::size_t>(1, std::llround(frac * members.size()));
    take = std::min(take, members.size());
    picked.insert(picked.end(), members.begin(), members.begin() + take);
  }
  std::sort(picked.begin(), picked.end());
  CfDataset out;
  for (int idx : picked) {
    out.features.push_back(data.features[idx]);
    out.labels.push_back(data.labels[idx]);
  }
  return out;
}

struct LearningCurvePoint {
  std::size_t size;
  std::uint64_t seed;
  double accuracy;
};

/// CV accuracy at fixed hyperparameters over geometric subsample sizes.
inline std::vector<LearningCurvePoint> learning_curve(
    const CfDataset& data, const std::vector<std::size_t>& sizes,
    const std::vector<std::uint64_t>& seeds, int folds, double c_box, double gamma,
    const SvmTrainOptions& opts = {}) {
  std::vector<LearningCurvePoint> out;
  for (std::size_t size : sizes) {
    for (std::uint64_t seed : seeds) {
      CfDataset sub = stratified_subsample(data, size, seed);
      double acc = cv_accuracy(sub, folds, c_box, gamma, seed, opts);
      out.push_back({size, seed, acc});
    }
  }
  return out;
}

inline std::vector<std::size_t> learning_curve_sizes(std::size_t full) {
  std::vector<std::size_t> sizes;
  for (std::size_t s = 1000; s < full; s *= 2) sizes.push_back(s);
  sizes.push_back(full);
  return sizes;
}

}  // namespace inseam
