#include <cfloat>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "frhelm/mittag_leffler.hpp"
#include "frhelm/numeric.hpp"

using namespace frhelm;

namespace ml_test {

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

struct Reference {
  double alpha, beta, z, value;
};

// 60-digit direct summation (mpmath) of the defining series.
constexpr Reference kReference[] = {
    {0.5, 1, -3, 0.17900115118138995042},
    {0.5, 1, 2.5, 1035.8148429726229083},
    {0.7, 1, -20, 0.01739569829160397999},
    {0.7, 1.7, -20, 0.049130215085419801},
    {0.7, 1, 12, 1871188388856723.5729},
    {0.3, 1, -2, 0.29023222616787535504},
    {0.5, 0.5, 3, 48618.530751582307633},
    {1.4, 1.7, -30, 0.011103741748043564824},
    {1.4, 1.4, 25, 6063.3967732408418217},
    {0.9, 1.9, -40, 0.024931413757555195988},
    {0.25, 1.25, -1.5, 0.42448139780003160435},
    {1.5, 1, -60, -0.0042085916177409564451},
    {0.6, 1.6, 40, 6.3292426972111279702e+201},
    {0.8, 1, -100, 0.0022056788685091107455},
};

}  // namespace ml_test

TEST(MittagLeffler, MatchesHighPrecisionReference) {
  for (const auto& r : ml_test::kReference) {
    const MLResult got = ml_eval({r.alpha, r.beta}, r.z);
    EXPECT_LT(ml_test::rel(got.value, r.value), 1e-12) << "E_{" << r.alpha << "," << r.beta << "}(" << r.z << ")";
  }
}

TEST(MittagLeffler, ExponentialSpecialCase) {
  EXPECT_EQ(ml_eval({1, 1}, 0.0).value, 1.0);
  EXPECT_LT(ml_test::rel(ml_eval({1, 1}, 1.0).value, std::exp(1.0)), 1e-15);
  for (double z = -700.0; z <= 700.0; z += 13.7) {
    EXPECT_LT(ml_test::rel(ml_eval({1, 1}, z).value, std::exp(z)), 1e-12) << z;
  }
}

TEST(MittagLeffler, ClosedFormsAtHalfAndOneTwo) {
  // E_{1/2,1}(z) = exp(z^2) erfc(-z); E_{1,2}(z) = (e^z - 1)/z
  for (double z = -5.0; z <= 5.0; z += 0.37) {
    const double want = std::exp(z * z) * std::erfc(-z);
    EXPECT_LT(ml_test::rel(ml_eval({0.5, 1}, z).value, want), 1e-12) << z;
    EXPECT_LT(ml_test::rel(ml_eval({1, 2}, z).value, std::expm1(z) / z), 1e-13) << z;
  }
}

TEST(MittagLeffler, TrigonometricAndHyperbolicForms) {
  for (double x = 0.25; x < 900.0; x *= 1.7) {
    const double r = std::sqrt(x);
    EXPECT_LT(ml_test::rel(ml_eval({2, 1}, x).value, std::cosh(r)), 1e-12) << x;
    EXPECT_LT(ml_test::rel(ml_eval({2, 2}, x).value, std::sinh(r) / r), 1e-12) << x;
    EXPECT_NEAR(ml_eval({2, 1}, -x).value, std::cos(r), 1e-12) << x;
    EXPECT_NEAR(ml_eval({2, 2}, -x).value, std::sin(r) / r, 1e-12) << x;
  }
}

TEST(MittagLeffler, OddPartIdentity) {
  // E_{a,1}(m) - E_{a,1}(-m) = 2 m E_{2a,a+1}(m^2)
  // compared in scaled form: E_{0.25,1}(20) is far beyond double range
  for (double a : {0.25, 0.5, 0.75, 1.0}) {
    for (double m : {0.1, 1.0, 5.0, 20.0}) {
      const Scaled lhs = ml_eval_scaled({a, 1}, m).value - ml_eval_scaled({a, 1}, -m).value;
      const Scaled rhs = ml_eval_scaled({2 * a, a + 1}, m * m).value * (2.0 * m);
      EXPECT_LT(std::abs(ratio(lhs, rhs) - 1.0), 1e-12) << a << " " << m;
    }
  }
}

TEST(MittagLeffler, CompletelyMonotoneOnNegativeAxis) {
  for (double a : {0.2, 0.5, 0.9}) {
    double prev = ml_eval({a, 1}, 0.0).value;
    for (double x = 0.1; x < 80.0; x *= 1.3) {
      const double v = ml_eval({a, 1}, -x).value;
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, prev) << a << " " << x;
      prev = v;
    }
  }
}

TEST(MittagLeffler, RegimesAgreeOnOverlap) {
  for (double a : {0.6, 0.9, 1.3}) {
    for (double z : {-30.0, 30.0}) {
      const double w = std::pow(std::abs(z), 1.0 / a);
      if (w < 25.0) continue;
      const auto series = ml_series({a, 1.0}, z, 1e-15, 200000);
      const auto asym = ml_asymptotic({a, 1.0}, z, 60, 1e-10);
      EXPECT_LT(ml_test::rel(asym.value, series.value), 1e-8 * std::max(1.0, series.cancellation)) << a << " " << z;
    }
  }
}

TEST(MittagLeffler, RegimeReported) {
  EXPECT_EQ(ml_eval({0.8, 1}, 0.5).regime, MLRegime::series);
  EXPECT_EQ(ml_eval({0.8, 1}, -200.0).regime, MLRegime::asymptotic_negative);
  EXPECT_EQ(ml_eval({0.8, 1}, 200.0).regime, MLRegime::asymptotic_positive);
}

TEST(MittagLeffler, ScaledFormBeyondDoubleRange) {
  const MLScaledResult r = ml_eval_scaled({1, 1}, 1000.0);
  EXPECT_NEAR(r.value.log_abs(), 1000.0, 1e-10);
  EXPECT_TRUE(std::isinf(ml_eval({1, 1}, 1000.0).value));
}

TEST(MittagLeffler, SmoothedSaddlesBetweenTwoThirdsAndOne) {
  // negative axis past the Stokes line; reference forces the extended
  // precision series
  MLOptions series_only;
  series_only.asymptotic_from = std::numeric_limits<double>::infinity();
  for (double a : {0.67, 0.7, 0.8, 0.95, 0.99}) {
    for (double b : {1.0, 1.7}) {
      for (double w : {40.0, 60.0, 100.0}) {
        const double z = -std::pow(w, a);
        const auto got = ml_eval_scaled({a, b}, z);
        if (w >= 60.0) {
          EXPECT_EQ(got.regime, MLRegime::asymptotic_negative) << a << " " << z;
        }
        const double want = ml_eval_scaled({a, b}, z, series_only).value.value();
        EXPECT_LT(ml_test::rel(got.value.value(), want), 1e-13) << a << " " << b << " " << z;
      }
    }
  }
}

TEST(MittagLeffler, ErrorEstimateIsHonest) {
  for (const auto& r : ml_test::kReference) {
    const MLResult got = ml_eval({r.alpha, r.beta}, r.z);
    EXPECT_LE(std::abs(got.value - r.value), 10.0 * got.est_abs_error + 4.0 * DBL_EPSILON * std::abs(r.value));
  }
}

TEST(MittagLeffler, RejectsInvalidInput) {
  EXPECT_THROW(ml_eval({0.0, 1}, 1.0), Error);
  EXPECT_THROW(ml_eval({0.5, -1}, 1.0), Error);
  EXPECT_THROW(ml_eval({2.5, 1}, 1.0), Error);
  EXPECT_THROW(ml_eval({0.5, 1}, 1.0, 1e-16), Error);
  EXPECT_THROW(ml_eval({0.5, 1}, 1.0, 1e-3), Error);
  try {
    ml_asymptotic({0.5, 1}, 0.3, 5);
    FAIL() << "expected OutOfRegime";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRegime);
  }
}

TEST(MittagLeffler, SeriesBudgetExhaustion) {
  try {
    ml_series({0.5, 1}, 8.0, 1e-15, 5);
    FAIL() << "expected MLNonConvergent";
  } catch (const MLNonConvergent& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergent);
    EXPECT_GT(e.best().est_rel_error, 0.0);
  }
}
