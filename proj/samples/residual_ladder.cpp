// Fractional single-mode problem: the discrete residual should shrink as the
// grid is refined.
#include <cstdio>

#include "frhelm/solver.hpp"
#include "frhelm/verify.hpp"

int main() {
  using namespace frhelm;
  ProblemSpec spec;
  spec.kind = ProblemKind::Dirichlet;
  spec.alpha = 0.5;
  spec.eps = 0.3;
  spec.phi = BoundaryFunction::catalog("sin");
  spec.N = 4;
  const Solution sol = assemble(spec);
  std::printf("%6s %12s %14s %8s\n", "M", "h", "max residual", "order");
  for (const LadderLevel& lv : refinement_ladder(sol, {32, 64, 128, 256})) {
    std::printf("%6d %12.4e %14.6e %8.3f\n", lv.M, lv.h, lv.max_residual, lv.observed_order);
  }
}
