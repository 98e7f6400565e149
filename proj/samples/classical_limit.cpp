// At alpha = 1 the Dirichlet problem with phi = sin(m y), psi = 0 has the
// separated solution sinh(mu (1 - x)) / sinh(mu) sin(m y), mu^2 = m^2 + c^2.
#include <cmath>
#include <cstdio>

#include "frhelm/solver.hpp"

int main() {
  using namespace frhelm;
  for (int m = 1; m <= 3; ++m) {
    ProblemSpec spec;
    spec.kind = ProblemKind::Dirichlet;
    spec.alpha = 1.0;
    spec.c = 1.0;
    spec.phi = BoundaryFunction::from_expression("sin(" + std::to_string(m) + "*y)");
    spec.N = 8;
    const Solution sol = assemble(spec);
    const double mu = std::sqrt(m * m + spec.c * spec.c);
    double worst = 0.0;
    for (double x : {0.1, 0.5, 0.9}) {
      for (double y : {-2.0, 0.3, 1.7}) {
        const double exact = std::sinh(mu * (1.0 - x)) / std::sinh(mu) * std::sin(m * y);
        worst = std::max(worst, std::abs(sol.evaluate(x, y) - exact));
      }
    }
    std::printf("m=%d  max |u - u_exact| = %.3e\n", m, worst);
  }
}
