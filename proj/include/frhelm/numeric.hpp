#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace frhelm {

inline constexpr double pi = std::numbers::pi;

/// Neumaier's variant of Kahan summation. Order-dependent by nature, so callers
/// that promise reproducibility must feed terms in a fixed order.
template <class T = double>
class CompensatedSum {
 public:
  void add(T x) {
    using std::abs;
    T t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(T x) {
    add(x);
    return *this;
  }

  T value() const { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

/// A positive-or-signed real stored as mantissa * exp(log_scale), used where
/// Mittag-Leffler values overflow double range (E_{a,b}(z) ~ exp(z^{1/a})).
struct Scaled {
  double mantissa = 0.0;
  double log_scale = 0.0;

  static Scaled from(double v) { return {v, 0.0}; }

  double value() const {
    if (mantissa == 0.0) return 0.0;
    return mantissa * std::exp(log_scale);
  }

  /// log|value|; -inf for zero.
  double log_abs() const {
    if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mantissa)) + log_scale;
  }
};

inline Scaled operator*(Scaled a, Scaled b) { return {a.mantissa * b.mantissa, a.log_scale + b.log_scale}; }

inline Scaled operator*(Scaled a, double b) { return {a.mantissa * b, a.log_scale}; }

/// a / b as a plain double. Underflows gracefully to 0.
inline double ratio(Scaled a, Scaled b) {
  if (a.mantissa == 0.0) return 0.0;
  return (a.mantissa / b.mantissa) * std::exp(a.log_scale - b.log_scale);
}

inline Scaled operator-(Scaled a, Scaled b) {
  if (b.mantissa == 0.0) return a;
  if (a.mantissa == 0.0) return {-b.mantissa, b.log_scale};
  const double s = std::max(a.log_scale, b.log_scale);
  return {a.mantissa * std::exp(a.log_scale - s) - b.mantissa * std::exp(b.log_scale - s), s};
}

inline Scaled operator+(Scaled a, Scaled b) { return a - Scaled{-b.mantissa, b.log_scale}; }

/// 1/Gamma(x), exactly zero at the poles x = 0, -1, -2, ...
inline double rgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x > 171.0) return std::exp(-std::lgamma(x));
  if (x < -170.0) {
    // reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi
    const double s = std::sin(pi * (x - 2.0 * std::floor(x / 2.0)));
    return std::exp(std::lgamma(1.0 - x)) * s / pi;
  }
  return 1.0 / std::tgamma(x);
}

inline double relative_error(double computed, double exact) {
  if (exact == 0.0) return std::abs(computed);
  return std::abs(computed - exact) / std::abs(exact);
}

}  // namespace frhelm
