#include <cmath>

#include <gtest/gtest.h>

#include "frhelm/quadrature.hpp"

using namespace frhelm;

TEST(Quadrature, GaussLegendreExactForPolynomials) {
  for (int n : {1, 2, 5, 16, 64}) {
    const GaussRule& g = gauss_legendre(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(s, exact, 1e-14) << n << " " << d;
    }
  }
}

TEST(Quadrature, GaussLegendreSymmetricAndAscending) {
  const GaussRule& g = gauss_legendre(33);
  for (int i = 0; i < 33; ++i) {
    EXPECT_EQ(g.nodes[i], -g.nodes[32 - i]);
    EXPECT_EQ(g.weights[i], g.weights[32 - i]);
    if (i) {
      EXPECT_LT(g.nodes[i - 1], g.nodes[i]);
    }
  }
}

TEST(Quadrature, CompositeRuleOnPeriod) {
  const CompositeRule r = composite_rule(QuadSpec{}, 20.0);
  EXPECT_EQ(r.panels % 2, 0);
  EXPECT_NEAR(integrate(r, [](double y) { return std::sin(20 * y) * std::sin(20 * y); }), pi, 1e-13);
  EXPECT_NEAR(integrate(r, [](double y) { return std::cos(19.5 * y) * std::cos(0.5 * y); }), 0.0, 1e-13);
  EXPECT_NEAR(integrate(r, [](double y) { return std::exp(std::cos(y)); }), 2 * pi * std::cyl_bessel_i(0.0, 1.0),
              1e-13);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r.nodes[i], -r.nodes[r.size() - 1 - i]);
}

TEST(Quadrature, PanelCountGrowsWithWavenumber) {
  EXPECT_EQ(auto_panels(0.0), 8);
  EXPECT_GE(auto_panels(64.0), static_cast<int>(64 * 2 * pi / 4));
  EXPECT_EQ(composite_rule(3, 4).panels, 4);
  EXPECT_THROW(composite_rule(1, 4), Error);
}
