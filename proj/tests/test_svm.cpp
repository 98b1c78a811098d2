#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "inseam/svm/evaluate.hpp"

using namespace inseam;

namespace {

Vec6 feat(double a, double b) {
  Vec6 v = Vec6::Zero();
  v[0] = a;
  v[1] = b;
  return v;
}

CfDataset blobs(int per_class, double separation, double spread, std::uint64_t seed,
                int classes = 2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  CfDataset d;
  for (int c = 0; c < classes; ++c) {
    double cx = separation * std::cos(2 * M_PI * c / classes);
    double cy = separation * std::sin(2 * M_PI * c / classes);
    for (int i = 0; i < per_class; ++i) {
      d.features.push_back(feat(cx + spread * n01(rng), cy + spread * n01(rng)));
      d.labels.push_back(c);
    }
  }
  return d;
}

double rbf(const Vec6& a, const Vec6& b, double gamma) {
  return std::exp(-gamma * (a - b).squaredNorm());
}

/// Dense QP oracle for a tiny C-SVM dual: enumerates every active-set
/// combination (0 / C / free per variable), solves the KKT system for the
/// free block, and returns the feasible candidate with the best dual
/// objective.
std::vector<double> qp_oracle(const std::vector<Vec6>& x, const std::vector<double>& y,
                              double c_box, double gamma) {
  const int n = int(x.size());
  MatX q(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) q(i, j) = y[i] * y[j] * rbf(x[i], x[j], gamma);
  }
  auto objective = [&](const VecX& a) { return a.sum() - 0.5 * a.dot(q * a); };

  std::vector<double> best;
  double best_obj = -std::numeric_limits<double>::infinity();
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  for (int mask = 0; mask < combos; ++mask) {
    std::vector<int> kind(n);  // 0: zero, 1: at C, 2: free
    int m = mask;
    for (int i = 0; i < n; ++i) {
      kind[i] = m % 3;
      m /= 3;
    }
    std::vector<int> free_idx;
    VecX a = VecX::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (kind[i] == 1) a[i] = c_box;
      if (kind[i] == 2) free_idx.push_back(i);
    }
    double b = 0.0;
    int nf = int(free_idx.size());
    if (nf > 0) {
      MatX sys = MatX::Zero(nf + 1, nf + 1);
      VecX rhs = VecX::Zero(nf + 1);
      for (int r = 0; r < nf; ++r) {
        for (int c = 0; c < nf; ++c) sys(r, c) = q(free_idx[r], free_idx[c]);
        sys(r, nf) = y[free_idx[r]];
        sys(nf, r) = y[free_idx[r]];
        double fixed = 0.0;
        for (int i = 0; i < n; ++i) {
          if (kind[i] == 1) fixed += q(free_idx[r], i) * c_box;
        }
        rhs[r] = 1.0 - fixed;
      }
      double fixed_eq = 0.0;
      for (int i = 0; i < n; ++i) {
        if (kind[i] == 1) fixed_eq += y[i] * c_box;
      }
      rhs[nf] = -fixed_eq;
      Eigen::FullPivLU<MatX> lu(sys);
      if (lu.rank() < nf + 1) continue;
      VecX sol = lu.solve(rhs);
      bool ok = true;
      for (int r = 0; r < nf; ++r) {
        a[free_idx[r]] = sol[r];
        if (sol[r] < -1e-9 || sol[r] > c_box + 1e-9) ok = false;
      }
      if (!ok) continue;
      b = sol[nf];
    } else {
      double eq = 0.0;
      for (int i = 0; i < n; ++i) eq += y[i] * a[i];
      if (std::abs(eq) > 1e-9) continue;
      // b unconstrained; pick it to satisfy the bounded KKT checks if possible
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        double g = (q.row(i) * a)(0) - 1.0;  // + b*y_i must have the right sign
        if (kind[i] == 0) {
          // need g + b*y >= 0
          if (y[i] > 0) lo = std::max(lo, -g);
          else hi = std::min(hi, g);
        } else {
          if (y[i] > 0) hi = std::min(hi, -g);
          else lo = std::max(lo, g);
        }
      }
      if (lo > hi + 1e-9) continue;
      b = std::clamp(0.0, lo, hi);
    }
    // KKT sign conditions for bounded variables
    bool kkt = true;
    for (int i = 0; i < n && kkt; ++i) {
      double g = (q.row(i) * a)(0) - 1.0 + b * y[i];
      if (kind[i] == 0 && g < -1e-7) kkt = false;
      if (kind[i] == 1 && g > 1e-7) kkt = false;
    }
    if (!kkt) continue;
    double obj = objective(a);
    if (obj > best_obj) {
      best_obj = obj;
      best.assign(a.data(), a.data() + n);
    }
  }
  REQUIRE(!best.empty());
  return best;
}

}  // namespace

TEST_CASE("standardize") {
  SECTION("two symmetric samples stay put") {
    CfDataset d;
    d.features = {feat(-1, 0), feat(1, 0)};
    d.labels = {0, 1};
    auto s = compute_standardization(d);
    CfDataset t = standardize(d, s);
    CHECK(t.features[0][0] == Catch::Approx(-1.0));
    CHECK(t.features[1][0] == Catch::Approx(1.0));
  }
  SECTION("constant features map to zero") {
    CfDataset d;
    d.features = {feat(5, 2), feat(5, 3), feat(5, 4)};
    d.labels = {0, 0, 1};
    auto s = compute_standardization(d);
    CfDataset t = standardize(d, s);
    for (const auto& x : t.features) CHECK(x[0] == 0.0);
  }
  SECTION("random data is zero-mean unit-std afterwards") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(3.0, 2.5);
    CfDataset d;
    for (int i = 0; i < 500; ++i) {
      Vec6 v;
      for (int k = 0; k < 6; ++k) v[k] = n(rng) * (k + 1);
      d.features.push_back(v);
      d.labels.push_back(i % 2);
    }
    CfDataset t = standardize(d, compute_standardization(d));
    auto s2 = compute_standardization(t);
    CHECK(s2.mean.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s2.std - Vec6::Ones()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("empty dataset is an error") {
    CHECK_THROWS_AS(compute_standardization(CfDataset{}), DataError);
  }
}

TEST_CASE("train_svm on separable pairs") {
  CfDataset d;
  d.features = {feat(-1, 0), feat(1, 0)};
  d.labels = {0, 1};
  SvmModel model = train_svm(d, 10.0, 1.0);
  CHECK(predict(model, Wrench6::from_vec(feat(-1, 0))) == 0);
  CHECK(predict(model, Wrench6::from_vec(feat(1, 0))) == 1);

  CfDataset single;
  single.features = {feat(0, 0), feat(1, 1)};
  single.labels = {3, 3};
  CHECK_THROWS_AS(train_svm(single, 10.0, 1.0), DataError);
  CHECK_THROWS_AS(train_svm(d, -1.0, 1.0), UsageError);
}

TEST_CASE("XOR layout matches the dense QP oracle") {
  // standardized by hand so the oracle and SMO see identical features
  std::vector<Vec6> x = {feat(-1, -1), feat(-1, 1), feat(1, -1), feat(1, 1)};
  std::vector<double> y = {1.0, -1.0, -1.0, 1.0};
  double c_box = 10.0, gamma = 1.0;

  Eigen::Matrix<double, 6, Eigen::Dynamic> xm(6, 4);
  for (int i = 0; i < 4; ++i) xm.col(i) = x[i];
  RbfKernel kernel(xm, gamma, 1 << 20);
  SmoResult res = solve_smo(kernel, y, c_box);
  REQUIRE(res.converged);

  std::vector<double> oracle = qp_oracle(x, y, c_box, gamma);
  MatX q(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) q(i, j) = y[i] * y[j] * rbf(x[i], x[j], gamma);
  }
  auto objective = [&](const std::vector<double>& a) {
    VecX av = Eigen::Map<const VecX>(a.data(), 4);
    return av.sum() - 0.5 * av.dot(q * av);
  };
  CHECK(objective(res.alpha) == Catch::Approx(objective(oracle)).margin(1e-3));
  for (int i = 0; i < 4; ++i) {
    CHECK(res.alpha[i] == Catch::Approx(oracle[i]).margin(2e-3));
    CHECK(res.alpha[i] >= -1e-12);
    CHECK(res.alpha[i] <= c_box + 1e-12);
  }

  // 100% training accuracy via the full model path
  CfDataset d;
  d.features = x;
  d.labels = {1, 0, 0, 1};
  SvmModel model = train_svm(d, c_box, gamma);
  for (int i = 0; i < 4; ++i) {
    CHECK(predict(model, Wrench6::from_vec(x[i])) == d.labels[i]);
  }
}

TEST_CASE("KKT conditions hold at the SMO solution") {
  CfDataset d = blobs(120, 1.5, 0.8, 77, 2);
  SvmModel model = train_svm(d, 10.0, 1.0);
  // recompute the gradient of the first machine from scratch
  CfDataset sd = standardize(d, model.standardization);
  std::vector<Vec6> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < sd.size(); ++i) {
    xs.push_back(sd.features[i]);
    ys.push_back(sd.labels[i] == model.machines[0].label_a ? 1.0 : -1.0);
  }
  // alpha from the stored machine (coef = alpha * y on support vectors)
  std::vector<double> alpha(xs.size(), 0.0);
  const auto& m = model.machines[0];
  for (std::size_t t = 0; t < m.sv_index.size(); ++t) {
    Vec6 sv = model.support_vectors.col(m.sv_index[t]);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if ((xs[i] - sv).norm() < 1e-12 && alpha[i] == 0.0) {
        alpha[i] = std::abs(m.coef[t]);
        break;
      }
    }
  }
  double gmax = -1e9, gmin = 1e9;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double g = -1.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      g += ys[i] * ys[j] * alpha[j] * rbf(xs[i], xs[j], 1.0);
    }
    bool up = (ys[i] > 0 && alpha[i] < 10.0 - 1e-9) || (ys[i] < 0 && alpha[i] > 1e-9);
    bool low = (ys[i] > 0 && alpha[i] > 1e-9) || (ys[i] < 0 && alpha[i] < 10.0 - 1e-9);
    if (up) gmax = std::max(gmax, -ys[i] * g);
    if (low) gmin = std::min(gmin, -ys[i] * g);
  }
  CHECK(gmax - gmin < 1e-3 + 1e-9);
}

TEST_CASE("training is invariant to sample order") {
  CfDataset d = blobs(60, 1.2, 0.9, 5, 3);
  SvmModel a = train_svm(d, 10.0, 1.0);
  // shuffle the dataset
  std::mt19937_64 rng(9);
  std::vector<int> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  CfDataset shuffled;
  for (int i : idx) {
    shuffled.features.push_back(d.features[i]);
    shuffled.labels.push_back(d.labels[i]);
  }
  SvmModel b = train_svm(shuffled, 10.0, 1.0);
  CHECK(svm_to_json(a).dump() == svm_to_json(b).dump());

  std::mt19937_64 prng(10);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Wrench6 w = Wrench6::from_vec(feat(2.0 * n01(prng), 2.0 * n01(prng)));
    REQUIRE(predict(a, w) == predict(b, w));
  }
}

TEST_CASE("removing a non-support-vector leaves decisions unchanged") {
  CfDataset d = blobs(80, 2.0, 0.5, 13, 2);
  SvmModel model = train_svm(d, 10.0, 1.0);

  // locate a training sample that is not a support vector of the machine
  CfDataset sd = standardize(d, model.standardization);
  auto is_sv = [&](const Vec6& x) {
    for (int c = 0; c < model.support_vectors.cols(); ++c) {
      if ((model.support_vectors.col(c) - x).norm() < 1e-12) return true;
    }
    return false;
  };
  int drop = -1;
  for (std::size_t i = 0; i < sd.size(); ++i) {
    if (!is_sv(sd.features[i])) {
      drop = int(i);
      break;
    }
  }
  REQUIRE(drop >= 0);
  CfDataset reduced;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (int(i) == drop) continue;
    reduced.features.push_back(d.features[i]);
    reduced.labels.push_back(d.labels[i]);
  }
  SvmModel model2 = train_svm(reduced, 10.0, 1.0);

  auto decision = [](const SvmModel& mo, const Vec6& raw) {
    Vec6 x = mo.standardization.apply(raw);
    const auto& m = mo.machines[0];
    double f = -m.rho;
    for (std::size_t t = 0; t < m.sv_index.size(); ++t) {
      f += m.coef[t] * rbf(mo.support_vectors.col(m.sv_index[t]), x, mo.gamma);
    }
    return f;
  };
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Vec6 probe = feat(2.5 * n01(rng), 2.5 * n01(rng));
    REQUIRE(std::abs(decision(model, probe) - decision(model2, probe)) < 1e-6);
  }
}

TEST_CASE("vote ties resolve to the lowest cf id") {
  // hand-built cyclic machines: 0 beats 1, 1 beats 2, 2 beats 0
  SvmModel model;
  model.labels = {0, 1, 2};
  model.support_vectors.resize(6, 0);
  model.machines = {{0, 1, {}, {}, -1.0, true},   // f = +1 -> votes 0
                    {0, 2, {}, {}, 1.0, true},    // f = -1 -> votes 2
                    {1, 2, {}, {}, -1.0, true}};  // f = +1 -> votes 1
  CHECK(predict(model, Wrench6{}) == 0);
}

TEST_CASE("cross_validate") {
  SECTION("separable blobs reach accuracy 1 at some grid point") {
    CfDataset d = blobs(60, 3.0, 0.3, 21, 2);
    CrossValResult r = cross_validate(d, 5, default_grid(), 0);
    CHECK(r.best_accuracy == Catch::Approx(1.0));
  }
  SECTION("label-shuffled data scores at chance level") {
    std::mt19937_64 rng(33);
    std::normal_distribution<double> n01(0.0, 1.0);
    CfDataset d;
    // 3 classes with frequencies 0.5 / 0.3 / 0.2, features pure noise
    for (int i = 0; i < 900; ++i) {
      d.features.push_back(feat(n01(rng), n01(rng)));
      d.labels.push_back(i < 450 ? 0 : (i < 720 ? 1 : 2));
    }
    std::shuffle(d.labels.begin(), d.labels.end(), rng);
    double majority = double(d.count_of(0)) / double(d.size());
    double acc = cv_accuracy(d, 5, 10.0, 1.0, 0);
    CHECK(std::abs(acc - majority) < 0.05);
  }
  SECTION("fold count checks") {
    CfDataset d = blobs(4, 2.0, 0.3, 2, 2);
    CHECK_THROWS_AS(cross_validate(d, 1, default_grid(), 0), UsageError);
    CHECK_THROWS_AS(cross_validate(d, 5, default_grid(), 0), DataError);
  }
}

TEST_CASE("confusion matrix") {
  std::vector<int> labels = {0, 1, 2};
  SECTION("perfect predictions are diagonal") {
    std::vector<int> t = {0, 1, 2, 1, 0};
    ConfusionMatrix cm = confusion_matrix(t, t, labels);
    CHECK(cm.diagonal() == 5);
    CHECK(cm.total() == 5);
    CHECK(cm.accuracy() == 1.0);
  }
  SECTION("single confusion lands off-diagonal") {
    ConfusionMatrix cm = confusion_matrix({2}, {1}, labels);
    CHECK(cm.counts[1][2] == 1);
    CHECK(cm.diagonal() == 0);
  }
  SECTION("unknown label is an error") {
    CHECK_THROWS_AS(confusion_matrix({5}, {1}, labels), DataError);
  }
  SECTION("rows sum to per-class truth counts") {
    std::vector<int> truths = {0, 0, 1, 2, 2, 2};
    std::vector<int> preds = {0, 1, 1, 0, 2, 1};
    ConfusionMatrix cm = confusion_matrix(preds, truths, labels);
    std::int64_t row2 = cm.counts[2][0] + cm.counts[2][1] + cm.counts[2][2];
    CHECK(row2 == 3);
  }
}

TEST_CASE("dataset CSV round trip and errors") {
  CfDataset d = blobs(10, 1.0, 0.5, 42, 3);
  auto tmp = std::filesystem::temp_directory_path() / "inseam_svm_test.csv";
  write_dataset_csv(d, tmp.string());
  CfDataset back = read_dataset_csv(tmp.string());
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK((back.features[i] - d.features[i]).norm() == 0.0);
    CHECK(back.labels[i] == d.labels[i]);
  }
  // truncated line reports its number
  {
    std::ofstream out(tmp);
    out << "fx,fy,fz,tx,ty,tz,cf\n1,2,3,4,5,6,0\n1,2,3\n";
  }
  try {
    read_dataset_csv(tmp.string());
    FAIL("expected parse error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  std::filesystem::remove(tmp);
}

TEST_CASE("model JSON round trip is byte-stable and prediction-identical") {
  CfDataset d = blobs(50, 1.5, 0.6, 7, 3);
  SvmModel model = train_svm(d, 10.0, 1.0);
  Json j = svm_to_json(model);
  SvmModel back = svm_from_json(j);
  CHECK(svm_to_json(back).dump() == j.dump());
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Wrench6 w = Wrench6::from_vec(feat(2 * n01(rng), 2 * n01(rng)));
    REQUIRE(predict(model, w) == predict(back, w));
  }
}
