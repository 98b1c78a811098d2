#include <cstdio>
#include <chrono>
#include "helpers/batch_oracle.hpp"
#include "helpers/random_graph.hpp"
#include "inseam/factor/graph.hpp"
using namespace inseam;
using namespace inseam_test;
double run_with_cap(int cap, int rep, int nodes) {
  const SceneConfig scene = rep % 2 ? builtin_ellip_scene() : builtin_rect_scene();
  RandomGraphProblem p = make_random_problem(scene, nodes, 1000 + rep);
  GraphOptions opt; opt.max_gauss_newton_iterations = cap;
  FactorGraph g(opt);
  for (int t = 0; t < (int)p.init.size(); ++t) {
    g.add_node(p.init[t]);
    for (int fi : p.factors_per_node[t]) g.add_factor(p.factors[fi]);
    g.solve_incremental();
    if (g.needs_relinearization()) g.batch_relinearize();
  }
  auto t0 = std::chrono::steady_clock::now();
  g.batch_relinearize();
  auto t1 = std::chrono::steady_clock::now();
  auto oracle = batch_gauss_newton_oracle(p.init, p.factors, 200, 1e-14);
  double gap = 0;
  for (int i = 0; i < g.num_nodes(); ++i) {
    gap = std::max(gap, pose_difference(g.estimate(i).pose, oracle[i].pose).cwiseAbs().maxCoeff());
    for (auto& [id, q] : g.estimate(i).wall_points)
      gap = std::max(gap, (q - oracle[i].wall_points.at(id)).cwiseAbs().maxCoeff());
    for (auto& [id, q] : g.estimate(i).object_points_var)
      gap = std::max(gap, (q - oracle[i].object_points_var.at(id)).cwiseAbs().maxCoeff());
  }
  printf("cap %3d rep %d nodes %d: gap %.3e  final-batch %.1f ms\n", cap, rep, nodes, gap,
         std::chrono::duration<double, std::milli>(t1 - t0).count());
  return gap;
}
int main() {
  for (int rep = 0; rep < 4; ++rep) run_with_cap(25, rep, 60);
  for (int rep = 0; rep < 4; ++rep) run_with_cap(50, rep, 60);
  for (int rep = 0; rep < 2; ++rep) run_with_cap(50, rep, 200);
  return 0;
}
