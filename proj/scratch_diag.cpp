#include <cstdio>
#include "helpers/batch_oracle.hpp"
#include "helpers/random_graph.hpp"
#include "inseam/factor/graph.hpp"
using namespace inseam;
using namespace inseam_test;
int main() {
  for (int rep = 0; rep < 4; ++rep) {
    const SceneConfig scene = rep % 2 == 0 ? builtin_rect_scene() : builtin_ellip_scene();
    RandomGraphProblem p = make_random_problem(scene, 60, 1000 + rep);
    FactorGraph g;
    for (int t = 0; t < (int)p.init.size(); ++t) {
      g.add_node(p.init[t]);
      for (int fi : p.factors_per_node[t]) g.add_factor(p.factors[fi]);
      g.solve_incremental();
      if (g.needs_relinearization()) g.batch_relinearize();
    }
    g.batch_relinearize();
    double c1 = g.total_cost();
    // extra batch passes to see whether the stopping rule left slack
    g.batch_relinearize(); g.batch_relinearize(); g.batch_relinearize();
    double c2 = g.total_cost();
    auto oracle = batch_gauss_newton_oracle(p.init, p.factors, 200, 1e-14);
    double oc = oracle_cost(oracle, p.factors);
    double gap1 = 0;
    for (int i = 0; i < g.num_nodes(); ++i) {
      gap1 = std::max(gap1, pose_difference(g.estimate(i).pose, oracle[i].pose).cwiseAbs().maxCoeff());
      for (auto& [id, q] : g.estimate(i).wall_points)
        gap1 = std::max(gap1, (q - oracle[i].wall_points.at(id)).cwiseAbs().maxCoeff());
      for (auto& [id, q] : g.estimate(i).object_points_var)
        gap1 = std::max(gap1, (q - oracle[i].object_points_var.at(id)).cwiseAbs().maxCoeff());
    }
    printf("rep %d: impl cost %.12f (after extra %.12f), oracle %.12f, maxgap %.3e\n",
           rep, c1, c2, oc, gap1);
  }
  return 0;
}
