#pragma once

#include <cmath>
#include <cstddef>
#include <list>
#include <unordered_map>
#include <vector>

#include "inseam/common.hpp"

namespace inseam {

/// RBF kernel rows over a 6 x n feature block, with an LRU row cache and a
/// budget on raw kernel evaluations.
class RbfKernel {
 public:
  RbfKernel(const Eigen::Matrix<double, 6, Eigen::Dynamic>& x, double gamma,
            std::size_t cache_bytes)
      : x_(x), gamma_(gamma) {
    norms_ = x_.colwise().squaredNorm();
    max_cached_rows_ = std::max<std::size_t>(2, cache_bytes / (sizeof(double) * x_.cols()));
  }

  std::int64_t evaluations() const { return evaluations_; }
  int size() const { return int(x_.cols()); }

  /// Full kernel row for sample i (cached).
  const VecX& row(int i) {
    auto it = cache_.find(i);
    if (it != cache_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.second);
      return it->second.first;
    }
    VecX d2 = (norms_.array() + norms_[i] - 2.0 * (x_.transpose() * x_.col(i)).array());
    VecX r = (-gamma_ * d2.array()).exp();
    evaluations_ += x_.cols();
    if (cache_.size() >= max_cached_rows_) {
      cache_.erase(lru_.back());
      lru_.pop_back();
    }
    lru_.push_front(i);
    auto [ins, ok] = cache_.emplace(i, std::make_pair(std::move(r), lru_.begin()));
    return ins->second.first;
  }

  double entry(int i, int j) {
    auto it = cache_.find(i);
    if (it != cache_.end()) return it->second.first[j];
    it = cache_.find(j);
    if (it != cache_.end()) return it->second.first[i];
    ++evaluations_;
    return std::exp(-gamma_ * (x_.col(i) - x_.col(j)).squaredNorm());
  }

 private:
  const Eigen::Matrix<double, 6, Eigen::Dynamic>& x_;
  double gamma_;
  VecX norms_;
  std::size_t max_cached_rows_;
  std::unordered_map<int, std::pair<VecX, std::list<int>::iterator>> cache_;
  std::list<int> lru_;
  std::int64_t evaluations_ = 0;
};

struct SmoResult {
  std::vector<double> alpha;  // dual coefficients in [0, C]
  double rho = 0.0;           // decision threshold: f(x) = sum coef K - rho
  bool converged = false;
  std::int64_t kernel_evaluations = 0;
  int iterations = 0;
};

/// Sequential minimal optimization for the C-SVM dual with maximal-violating-
/// pair working set selection. Labels are +1/-1. Stops when the KKT violation
/// drops below `tol` or the kernel-evaluation budget is exhausted.
inline SmoResult solve_smo(RbfKernel& kernel, const std::vector<double>& y, double c_box,
                           double tol = 1e-3, std::int64_t max_kernel_evals = 10000000) {
  const int n = kernel.size();
  SmoResult res;
  res.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 0.5 a'Qa - e'a at a = 0

  auto select_working_set = [&](int& out_i, int& out_j) -> bool {
    // i: max over I_up of -y*grad; j: min over I_low of -y*grad
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    out_i = -1;
    out_j = -1;
    for (int t = 0; t < n; ++t) {
      bool up = (y[t] > 0 && res.alpha[t] < c_box) || (y[t] < 0 && res.alpha[t] > 0);
      bool low = (y[t] > 0 && res.alpha[t] > 0) || (y[t] < 0 && res.alpha[t] < c_box);
      double v = -y[t] * grad[t];
      if (up && v > gmax) {
        gmax = v;
        out_i = t;
      }
      if (low && v < gmin) {
        gmin = v;
        out_j = t;
      }
    }
    return out_i >= 0 && out_j >= 0 && gmax - gmin >= tol;
  };

  int i, j;
  while (select_working_set(i, j)) {
    if (kernel.evaluations() > max_kernel_evals) break;
    ++res.iterations;
    const VecX& qi = kernel.row(i);
    const VecX& qj = kernel.row(j);
    double kii = qi[i], kjj = qj[j], kij = qi[j];
    double old_ai = res.alpha[i], old_aj = res.alpha[j];

    if (y[i] != y[j]) {
      double quad = kii + kjj + 2.0 * kij;
      if (quad <= 0) quad = 1e-12;
      double step = (-grad[i] - grad[j]) / quad;
      double diff = res.alpha[i] - res.alpha[j];
      res.alpha[i] += step;
      res.alpha[j] += step;
      if (diff > 0) {
        if (res.alpha[j] < 0) {
          res.alpha[j] = 0;
          res.alpha[i] = diff;
        }
        if (res.alpha[i] > c_box) {
          res.alpha[i] = c_box;
          res.alpha[j] = c_box - diff;
        }
      } else {
        if (res.alpha[i] < 0) {
          res.alpha[i] = 0;
          res.alpha[j] = -diff;
        }
        if (res.alpha[j] > c_box) {
          res.alpha[j] = c_box;
          res.alpha[i] = c_box + diff;
        }
      }
    } else {
      double quad = kii + kjj - 2.0 * kij;
      if (quad <= 0) quad = 1e-12;
      double step = (grad[i] - grad[j]) / quad;
      double sum = res.alpha[i] + res.alpha[j];
      res.alpha[i] -= step;
      res.alpha[j] += step;
      if (sum > c_box) {
        if (res.alpha[i] > c_box) {
          res.alpha[i] = c_box;
          res.alpha[j] = sum - c_box;
        }
        if (res.alpha[j] > c_box) {
          res.alpha[j] = c_box;
          res.alpha[i] = sum - c_box;
        }
      } else {
        if (res.alpha[j] < 0) {
          res.alpha[j] = 0;
          res.alpha[i] = sum;
        }
        if (res.alpha[i] < 0) {
          res.alpha[i] = 0;
          res.alpha[j] = sum;
        }
      }
    }

    double dai = res.alpha[i] - old_ai, daj = res.alpha[j] - old_aj;
    if (dai == 0.0 && daj == 0.0) break;  // numerically stuck
    for (int t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * qi[t] * dai + y[j] * qj[t] * daj);
    }
  }

  // KKT state at exit
  {
    int oi, oj;
    res.converged = !select_working_set(oi, oj);
  }

  // rho: average of -y*grad over free vectors, else midpoint of the bounds
  double sum = 0.0;
  int free_count = 0;
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < n; ++t) {
    double v = -y[t] * grad[t];
    bool up = (y[t] > 0 && res.alpha[t] < c_box) || (y[t] < 0 && res.alpha[t] > 0);
    bool low = (y[t] > 0 && res.alpha[t] > 0) || (y[t] < 0 && res.alpha[t] < c_box);
    if (res.alpha[t] > 0 && res.alpha[t] < c_box) {
      sum += v;
      ++free_count;
    }
    if (up) ub = std::min(ub, -v);
    if (low) lb = std::max(lb, -v);
    (void)up;
    (void)low;
  }
  if (free_count > 0) {
    res.rho = -sum / free_count;
  } else {
    res.rho = (ub + lb) / 2.0;
  }
  res.kernel_evaluations = kernel.evaluations();
  return res;
}

}  // namespace inseam
