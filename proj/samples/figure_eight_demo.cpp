// Spectrum of the figure eight at a few parameter values, then the Berry phase
// of the first excited even branch.

#include <cstdio>

#include "qgraph/qgraph.hpp"

int main() {
  using namespace qgraph;
  const MetricGraph g = build_figure_eight(1.0, 3.0);
  for (double theta : {0.0, 0.5 * kPi, 1.0, 1.5 * kPi}) {
    const SecularProblem p(g, {build_s_theta(theta)});
    std::printf("theta = %.6f:", theta);
    for (const auto& r : find_eigenvalues(p, 0.0, 7.0)) std::printf("  %.9f(x%d)", r.k, r.multiplicity);
    std::printf("\n");
  }

  SweepPlan plan{family_figure_eight(), build_figure_eight(1.0, 1.0), 256, BranchTarget{1, Sector::even, {}}, 1e-8};
  const auto result = berry_phase(track_branch(plan));
  std::printf("berry phase, n = 1 even: %.12f (%s)\n", result.eigenphases.front(),
              std::string(phase_class_name(result.classification.front())).c_str());
}
