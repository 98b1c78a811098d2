#pragma once

#include <vector>

#include "inseam/factor/factor.hpp"
#include "inseam/factor/sparse_qr.hpp"

namespace inseam {

struct GraphOptions {
  int relinearize_every_n_nodes = 25;
  double relin_delta_translation = 0.01;  // m
  double relin_delta_rotation = 0.05;     // rad
  int max_gauss_newton_iterations = 25;
  double cost_decrease_tol = 1e-10;
  double step_floor = 1e-9;  // keep iterating while steps are above this
  int max_step_halvings = 10;
};

/// Incremental nonlinear least-squares smoother. Factors are linearized at
/// per-node linearization points and folded into a QR-factorized square-root
/// information matrix; estimates come from back-substitution. Periodic batch
/// relinearization rebuilds the factorization at the current estimates and
/// iterates Gauss-Newton with step halving.
class FactorGraph {
 public:
  explicit FactorGraph(GraphOptions options = {}) : options_(options) {}

  int num_nodes() const { return int(linearization_.size()); }
  int num_factors() const { return int(factors_.size()); }
  const TimestepState& estimate(int node_id) const { return estimate_.at(node_id); }
  const TimestepState& linearization_point(int node_id) const {
    return linearization_.at(node_id);
  }
  bool last_batch_diverged() const { return last_batch_diverged_; }

  int add_node(const TimestepState& init) {
    if (!init.pose.is_finite()) throw DataError("node initialization must be finite");
    if (!linearization_.empty() && init.timestamp <= linearization_.back().timestamp) {
      throw DataError("node timestamps must be strictly increasing");
    }
    linearization_.push_back(init);
    estimate_.push_back(init);
    node_offsets_.push_back(total_dim_);
    total_dim_ += init.dim();
    r_.grow(total_dim_);
    ++nodes_since_relin_;
    return int(linearization_.size()) - 1;
  }

  int add_factor(const FactorSpec& f) {
    validate_factor(f);
    StoredFactor sf;
    sf.spec = f;
    sf.whitener = whitener(f.omega);
    factors_.push_back(sf);
    append_linearized_rows(factors_.back());
    return int(factors_.size()) - 1;
  }

  /// Back-substitution on the current R; estimates become the linearization
  /// points advanced by the solution. No relinearization is performed.
  void solve_incremental() {
    if (total_dim_ == 0) return;
    VecX delta = r_.solve([this](int col) { return column_name(col); });
    for (int i = 0; i < num_nodes(); ++i) {
      estimate_[i] =
          linearization_[i].plus(delta.segment(node_offsets_[i], linearization_[i].dim()));
    }
  }

  /// True when the relinearization schedule calls for a batch pass: every
  /// N added nodes, or whenever an estimate drifted from its linearization
  /// point beyond the translation/rotation thresholds.
  bool needs_relinearization() const {
    if (num_nodes() == 0) return false;
    if (nodes_since_relin_ >= options_.relinearize_every_n_nodes) return true;
    for (int i = 0; i < num_nodes(); ++i) {
      Vec6 dp = pose_difference(estimate_[i].pose, linearization_[i].pose);
      if (dp.head<3>().cwiseAbs().maxCoeff() > options_.relin_delta_translation) return true;
      if (dp.tail<3>().cwiseAbs().maxCoeff() > options_.relin_delta_rotation) return true;
      for (const auto& [id, p] : estimate_[i].wall_points) {
        if ((p - linearization_[i].wall_points.at(id)).cwiseAbs().maxCoeff() >
            options_.relin_delta_translation) {
          return true;
        }
      }
      for (const auto& [id, p] : estimate_[i].object_points_var) {
        if ((p - linearization_[i].object_points_var.at(id)).cwiseAbs().maxCoeff() >
            options_.relin_delta_translation) {
          return true;
        }
      }
    }
    return false;
  }

  /// Full Gauss-Newton with step halving from the current estimates; on exit
  /// the linearization points equal the estimates and R is rebuilt there.
  void batch_relinearize() {
    last_batch_diverged_ = false;
    nodes_since_relin_ = 0;
    if (num_nodes() == 0) return;
    std::vector<TimestepState> best = estimate_;
    double best_cost = cost_at(best);
    for (int iter = 0; iter < options_.max_gauss_newton_iterations; ++iter) {
      linearization_ = best;
      rebuild();
      VecX delta;
      try {
        delta = r_.solve([this](int col) { return column_name(col); });
      } catch (const SingularSystemError&) {
        estimate_ = best;
        throw;
      }
      double alpha = 1.0;
      bool accepted = false;
      std::vector<TimestepState> candidate;
      double cand_cost = 0.0;
      for (int h = 0; h <= options_.max_step_halvings; ++h) {
        candidate = apply_step(best, delta, alpha);
        cand_cost = cost_at(candidate);
        if (cand_cost <= best_cost) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        // a rejected step at the numerical floor is convergence, not divergence
        if (delta.cwiseAbs().maxCoeff() >= options_.step_floor) last_batch_diverged_ = true;
        break;
      }
      double decrease = best_cost - cand_cost;
      double step = alpha * delta.cwiseAbs().maxCoeff();
      best = candidate;
      best_cost = cand_cost;
      // the decrease rule alone can stall short of the optimum along weakly
      // constrained directions; require the step to die out as well
      if (decrease < options_.cost_decrease_tol && step < options_.step_floor) break;
    }
    estimate_ = best;
    linearization_ = best;
    rebuild();
  }

  /// Sum over factors of the squared Mahalanobis residual at the estimates.
  double total_cost() const { return cost_at(estimate_); }

  Json to_json() const {
    Json j;
    j["nodes"] = Json::array();
    for (int i = 0; i < num_nodes(); ++i) {
      Json n;
      n["id"] = i;
      n["timestamp"] = estimate_[i].timestamp;
      Json pose = Json::array();
      for (int k = 0; k < 6; ++k) pose.push_back(estimate_[i].pose.to_vec()[k]);
      n["pose"] = pose;
      Json wp = Json::object();
      for (const auto& [id, p] : estimate_[i].wall_points) {
        wp[id] = Json::array({p.x(), p.y(), p.z()});
      }
      n["wall_points"] = wp;
      Json op = Json::object();
      for (const auto& [id, p] : estimate_[i].object_points_var) {
        op[id] = Json::array({p.x(), p.y(), p.z()});
      }
      n["object_points"] = op;
      j["nodes"].push_back(n);
    }
    j["factors"] = Json::array();
    for (const auto& sf : factors_) {
      Json f;
      f["kind"] = factor_kind_name(sf.spec.kind);
      f["nodes"] = sf.spec.node_ids;
      f["dim"] = sf.spec.residual_dim();
      j["factors"].push_back(f);
    }
    j["total_cost"] = total_cost();
    return j;
  }

 private:
  struct StoredFactor {
    FactorSpec spec;
    MatX whitener;
  };

  void validate_factor(const FactorSpec& f) {
    int expected_nodes = f.kind == FactorKind::M ? 2 : 1;
    if (int(f.node_ids.size()) != expected_nodes) {
      throw DataError(std::string("factor ") + factor_kind_name(f.kind) + " needs " +
                      std::to_string(expected_nodes) + " node id(s)");
    }
    for (int id : f.node_ids) {
      if (id < 0 || id >= num_nodes()) {
        throw DataError("factor references unknown node " + std::to_string(id));
      }
    }
    if (f.kind == FactorKind::M && f.node_ids[1] != f.node_ids[0] + 1) {
      throw DataError("motion factors must connect consecutive nodes");
    }
    if (f.omega.rows() != f.residual_dim()) {
      throw DataError("omega dimension mismatch for factor kind " +
                      std::string(factor_kind_name(f.kind)));
    }
    if (f.kind == FactorKind::C) {
      if (f.object_point_id.empty() || f.wall_point_id.empty()) {
        throw DataError("contact factor with empty pairing");
      }
      const TimestepState& x = linearization_[f.node_ids[0]];
      x.block_offset(f.wall_point_id, false);
      if (f.object_point_is_variable) x.block_offset(f.object_point_id, true);
    }
    if (f.kind == FactorKind::L || f.kind == FactorKind::Q) {
      linearization_[f.node_ids[0]].block_offset(f.point_id, f.point_is_object);
    }
  }

  std::vector<const TimestepState*> gather(const std::vector<TimestepState>& states,
                                           const FactorSpec& f) const {
    std::vector<const TimestepState*> out;
    for (int id : f.node_ids) out.push_back(&states[id]);
    return out;
  }

  double cost_at(const std::vector<TimestepState>& states) const {
    double total = 0.0;
    for (const auto& sf : factors_) {
      VecX r = residual(sf.spec, gather(states, sf.spec));
      total += (sf.whitener * r).squaredNorm();
    }
    return total;
  }

  std::vector<TimestepState> apply_step(const std::vector<TimestepState>& base,
                                        const VecX& delta, double alpha) const {
    std::vector<TimestepState> out;
    out.reserve(base.size());
    for (int i = 0; i < int(base.size()); ++i) {
      out.push_back(base[i].plus(alpha * delta.segment(node_offsets_[i], base[i].dim())));
    }
    return out;
  }

  /// Linearizes one factor at the current linearization points and folds its
  /// whitened rows into R.
  void append_linearized_rows(const StoredFactor& sf) {
    auto states = gather(linearization_, sf.spec);
    VecX r = residual(sf.spec, states);
    std::vector<MatX> blocks = jacobian(sf.spec, states);
    VecX wr = sf.whitener * r;
    int first_col = total_dim_, last_col = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      int id = sf.spec.node_ids[b];
      first_col = std::min(first_col, node_offsets_[id]);
      last_col = std::max(last_col, node_offsets_[id] + linearization_[id].dim());
    }
    int width = last_col - first_col;
    MatX row_block = MatX::Zero(sf.spec.residual_dim(), width);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      int id = sf.spec.node_ids[b];
      row_block.middleCols(node_offsets_[id] - first_col, linearization_[id].dim()) +=
          sf.whitener * blocks[b];
    }
    for (int k = 0; k < row_block.rows(); ++k) {
      std::vector<double> vals(row_block.cols());
      for (int c = 0; c < row_block.cols(); ++c) vals[c] = row_block(k, c);
      r_.add_row(first_col, std::move(vals), -wr[k]);
    }
  }

  void rebuild() {
    r_.reset(total_dim_);
    for (const auto& sf : factors_) append_linearized_rows(sf);
  }

  std::string column_name(int col) const {
    for (int i = num_nodes() - 1; i >= 0; --i) {
      if (col >= node_offsets_[i]) {
        return "node " + std::to_string(i) + " " +
               linearization_[i].variable_name(col - node_offsets_[i]);
      }
    }
    return "column " + std::to_string(col);
  }

  GraphOptions options_;
  std::vector<TimestepState> linearization_;
  std::vector<TimestepState> estimate_;
  std::vector<StoredFactor> factors_;
  std::vector<int> node_offsets_;
  int total_dim_ = 0;
  SparseSquareRootMatrix r_;
  int nodes_since_relin_ = 0;
  bool last_batch_diverged_ = false;
};

}  // namespace inseam
