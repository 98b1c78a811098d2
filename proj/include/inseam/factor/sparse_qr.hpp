#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "inseam/common.hpp"

namespace inseam {

/// Row-sparse square-root information matrix: an upper-triangular R (plus the
/// rotated right-hand side) maintained by Givens rotations, one stored row per
/// column. New measurement rows are eliminated against existing rows, which
/// keeps the update cost bounded by the band width of the problem; for this
/// temporally-ordered smoother that is roughly two node blocks.
class SparseSquareRootMatrix {
 public:
  void reset(int cols) {
    rows_.assign(cols, {});
    rhs_.assign(cols, 0.0);
    cols_ = cols;
  }

  void grow(int cols) {
    if (cols < cols_) throw NumericError("square-root matrix cannot shrink");
    rows_.resize(cols);
    rhs_.resize(cols, 0.0);
    cols_ = cols;
  }

  int cols() const { return cols_; }

  /// Eliminates a whitened measurement row [vals starting at start_col | beta]
  /// into R via Givens rotations.
  void add_row(int start_col, std::vector<double> vals, double beta) {
    int j = start_col;
    std::size_t lead = 0;
    while (lead < vals.size() && vals[lead] == 0.0) {
      ++lead;
      ++j;
    }
    while (lead < vals.size()) {
      if (j >= cols_) throw NumericError("row extends past matrix columns");
      std::vector<double>& rj = rows_[j];
      if (rj.empty()) {
        rows_[j].assign(vals.begin() + lead, vals.end());
        rhs_[j] = beta;
        return;
      }
      // rotate (r_j, incoming) to zero the incoming leading coefficient
      double a = rj[0], b = vals[lead];
      double r = std::hypot(a, b);
      double c = a / r, s = b / r;
      std::size_t nr = rj.size(), na = vals.size() - lead;
      std::size_t n = std::max(nr, na);
      rj.resize(n, 0.0);
      if (na < n) vals.resize(lead + n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        double t1 = rj[k];
        double t2 = vals[lead + k];
        rj[k] = c * t1 + s * t2;
        vals[lead + k] = -s * t1 + c * t2;
      }
      double t1 = rhs_[j], t2 = beta;
      rhs_[j] = c * t1 + s * t2;
      beta = -s * t1 + c * t2;
      // leading coefficient is now zero by construction
      ++lead;
      ++j;
      while (lead < vals.size() && vals[lead] == 0.0) {
        ++lead;
        ++j;
      }
    }
    // fully eliminated: beta is residual error mass, not needed for the solve
  }

  double diagonal(int j) const { return rows_[j].empty() ? 0.0 : rows_[j][0]; }

  /// Back-substitution R x = rhs. `variable_name` labels the offending column
  /// when the system is rank deficient.
  VecX solve(const std::function<std::string(int)>& variable_name) const {
    VecX x = VecX::Zero(cols_);
    for (int j = cols_ - 1; j >= 0; --j) {
      const std::vector<double>& rj = rows_[j];
      if (rj.empty() || std::abs(rj[0]) < 1e-12) {
        throw SingularSystemError("singular system: unconstrained variable " +
                                  variable_name(j));
      }
      double acc = rhs_[j];
      for (std::size_t k = 1; k < rj.size(); ++k) {
        acc -= rj[k] * x[j + int(k)];
      }
      x[j] = acc / rj[0];
    }
    return x;
  }

  /// True when every column has a usable pivot.
  bool full_rank() const {
    for (int j = 0; j < cols_; ++j) {
      if (rows_[j].empty() || std::abs(rows_[j][0]) < 1e-12) return false;
    }
    return true;
  }

  /// Dense reconstruction, for tests.
  MatX to_dense() const {
    MatX m = MatX::Zero(cols_, cols_);
    for (int j = 0; j < cols_; ++j) {
      for (std::size_t k = 0; k < rows_[j].size(); ++k) m(j, j + int(k)) = rows_[j][k];
    }
    return m;
  }

  VecX rhs() const {
    VecX v(cols_);
    for (int j = 0; j < cols_; ++j) v[j] = rows_[j].empty() ? 0.0 : rhs_[j];
    return v;
  }

 private:
  int cols_ = 0;
  std::vector<std::vector<double>> rows_;
  std::vector<double> rhs_;
};

}  // namespace inseam
