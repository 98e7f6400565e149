#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "frhelm/solver.hpp"
#include "frhelm/verify.hpp"

using namespace frhelm;

namespace verify_test {

std::vector<double> sample(int M, double (*f)(double)) {
  std::vector<double> v(M + 1);
  for (int n = 0; n <= M; ++n) v[n] = f(static_cast<double>(n) / M);
  return v;
}

}  // namespace verify_test

TEST(Caputo, ConstantsVanishExactly) {
  for (double a : {0.3, 0.5, 1.0}) {
    const auto d = caputo_l1(std::vector<double>(65, 2.5), a);
    for (double v : d) EXPECT_EQ(v, 0.0);
    const auto dd = composed_caputo(std::vector<double>(65, -1.0), a);
    for (double v : dd) EXPECT_EQ(v, 0.0);
  }
}

TEST(Caputo, PlainL1ExactForLinear) {
  const double a = 0.5;
  const auto d = caputo_l1(verify_test::sample(64, [](double t) { return t; }), a);
  for (int n = 1; n <= 64; ++n) EXPECT_NEAR(d[n], std::pow(n / 64.0, 1 - a) / std::tgamma(2 - a), 1e-13);
}

TEST(Caputo, PlainL1ConvergesForQuadratic) {
  // D^a t^2 = 2 t^{2-a} / Gamma(3-a); L1 error is O(h^{2-a})
  const double a = 0.5;
  const double exact = 2.0 / std::tgamma(3 - a);
  double prev = 0.0;
  for (int M : {32, 64, 128, 256}) {
    const double err = std::abs(caputo_l1(verify_test::sample(M, [](double t) { return t * t; }), a).back() - exact);
    if (prev > 0.0) {
      EXPECT_GT(std::log2(prev / err), 1.2) << M;
    }
    prev = err;
  }
}

TEST(Caputo, Linearity) {
  const auto f = verify_test::sample(40, [](double t) { return std::sin(3 * t); });
  const auto g = verify_test::sample(40, [](double t) { return std::exp(t); });
  std::vector<double> h(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) h[i] = 2.0 * f[i] - 0.5 * g[i];
  const auto df = caputo_l1(f, 0.4), dg = caputo_l1(g, 0.4), dh = caputo_l1(h, 0.4);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(dh[i], 2.0 * df[i] - 0.5 * dg[i], 1e-12);
}

TEST(Caputo, CorrectedSchemeExactOnSingularTerms) {
  for (double a : {0.3, 0.5, 0.75}) {
    const int M = 50;
    std::vector<double> f(M + 1);
    for (int n = 0; n <= M; ++n) f[n] = 1.0 + 2.0 * std::pow(n / double(M), a) - std::pow(n / double(M), 2 * a);
    const auto d = caputo_l1_corrected(f, a);
    for (int n = 1; n <= M; ++n) {
      const double t = n / double(M);
      const double exact = 2.0 * std::tgamma(a + 1) + -std::tgamma(2 * a + 1) / std::tgamma(a + 1) * std::pow(t, a);
      EXPECT_NEAR(d[n], exact, 1e-10) << a << " " << n;
    }
  }
}

TEST(Caputo, CompositionMatchesSingleOrderForFlatStart) {
  // f = t^3: D^a D^a f = D^{2a} f = 6 t^{3-2a} / Gamma(4-2a)
  const double a = 0.4;
  const double exact = 6.0 / std::tgamma(4 - 2 * a);
  double prev = 1e300;
  for (int M : {32, 64, 128, 256}) {
    const auto d = composed_caputo(verify_test::sample(M, [](double t) { return t * t * t; }), a);
    const double err = std::abs(d.back() - exact);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Caputo, SecondDifferenceAtOrderOne) {
  const auto d = composed_caputo(verify_test::sample(64, [](double t) { return t * t; }), 1.0);
  for (double v : d) EXPECT_NEAR(v, 2.0, 1e-9);
}

TEST(Caputo, InputValidation) {
  try {
    caputo_l1(std::vector<double>(4, 0.0), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridTooCoarse);
  }
  EXPECT_THROW(caputo_l1(std::vector<double>(10, 0.0), 0.0), Error);
  EXPECT_THROW(caputo_l1(std::vector<double>(10, 0.0), 1.5), Error);
}

TEST(Residual, ClassicalSolutionConvergesAtSecondOrder) {
  ProblemSpec s;
  s.alpha = 1.0;
  s.eps = 0.4;
  s.c = 1.0;
  s.phi = BoundaryFunction::from_expression("sin(y) + cos(y/2)");
  const Solution sol = assemble(s);
  const auto ladder = refinement_ladder(sol, {32, 64, 128});
  EXPECT_TRUE(strictly_decreasing(ladder));
  EXPECT_NEAR(ladder.back().observed_order, 2.0, 0.2);
}

TEST(Residual, FractionalLadderDecreases) {
  ProblemSpec s;
  s.alpha = 0.75;
  s.eps = -0.5;
  s.phi = BoundaryFunction::from_expression("sin(y)");
  const Solution sol = assemble(s);
  EXPECT_TRUE(strictly_decreasing(refinement_ladder(sol, {32, 64, 128})));
}

TEST(Residual, ReportsTermsAndExclusion) {
  ProblemSpec s;
  s.alpha = 0.5;
  s.eps = 0.3;
  s.c = 2.0;
  s.phi = BoundaryFunction::from_expression("sin(y)");
  const ResidualReport r = pde_residual(assemble(s), 65, 65);
  EXPECT_EQ(r.first_x_probe, composed_first_valid);
  EXPECT_DOUBLE_EQ(r.excluded_x, 3.0 / 64);
  EXPECT_GT(r.terms.fractional, 0.0);
  EXPECT_GT(r.terms.involution, 0.0);
  EXPECT_GT(r.terms.helmholtz, 0.0);
  EXPECT_LT(r.max_abs, r.terms.fractional);
}

TEST(Residual, GridRequirements) {
  ProblemSpec s;
  s.phi = BoundaryFunction::from_expression("sin(y)");
  const Solution sol = assemble(s);
  try {
    pde_residual(sol, 17, 33);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridTooCoarse);
  }
  Field f = sol.evaluate_grid(33, 33);
  f.y[0] = -3.0;
  try {
    residual_from_field(f, 1.0, 0.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AsymmetricGrid);
  }
}

TEST(Boundary, ReproducesDataForEachKind) {
  struct Case {
    ProblemKind kind;
    const char* phi;
    const char* psi;
  };
  for (const Case c : {Case{ProblemKind::Dirichlet, "sin(2*y)", "cos(y/2)"}, Case{ProblemKind::Neumann, "cos(y)", "1"},
                       Case{ProblemKind::Periodic, "cos(2*y)", "sin(y)"},
                       Case{ProblemKind::AntiPeriodic, "cos(y/2)", "sin(5*y/2)"}}) {
    ProblemSpec s;
    s.kind = c.kind;
    s.alpha = 0.6;
    s.eps = 0.25;
    s.c = 0.5;
    s.phi = BoundaryFunction::from_expression(c.phi);
    s.psi = BoundaryFunction::from_expression(c.psi);
    const BoundaryReport b = boundary_report(assemble(s), s, 65);
    EXPECT_LT(b.max_error(), 1e-12) << to_string(c.kind);
    EXPECT_EQ(b.side.size(), 2u);
  }
}

TEST(Boundary, DetectsCorruption) {
  ProblemSpec s;
  s.phi = BoundaryFunction::from_expression("sin(y)");
  const Solution sol = assemble(s);
  const Solution bad = sol.perturbed(0, 1e-6, 0.0);
  EXPECT_GT(boundary_report(bad, s, 65).x0_error, 1e-7);
}

TEST(KernelBounds, SmallScanPasses) {
  const auto r = kernel_bounds_check({0.3, 0.9}, {0.5, 5.0}, 100, 2);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.violations, 0);
  EXPECT_FALSE(r.non_finite);
  EXPECT_GE(r.min_value, -1e-12);
  EXPECT_LE(r.max_value, 1.0 + 1e-12);
}
