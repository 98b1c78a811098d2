#include <cstdio>
#include "helpers/batch_oracle.hpp"
#include "helpers/random_graph.hpp"
#include "inseam/factor/graph.hpp"
using namespace inseam;
using namespace inseam_test;
int main() {
  int rep = 1;
  const SceneConfig scene = builtin_ellip_scene();
  RandomGraphProblem p = make_random_problem(scene, 60, 1000 + rep);
  FactorGraph g;
  for (int t = 0; t < (int)p.init.size(); ++t) {
    g.add_node(p.init[t]);
    for (int fi : p.factors_per_node[t]) g.add_factor(p.factors[fi]);
    g.solve_incremental();
    if (g.needs_relinearization()) g.batch_relinearize();
  }
  g.batch_relinearize();
  printf("after final batch: cost %.12f diverged=%d\n", g.total_cost(), (int)g.last_batch_diverged());
  for (int k = 0; k < 6; ++k) {
    g.batch_relinearize();
    printf("extra pass %d: cost %.12f diverged=%d\n", k, g.total_cost(), (int)g.last_batch_diverged());
  }
  return 0;
}
