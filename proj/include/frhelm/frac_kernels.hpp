#pragma once

// Kernels of the two-point problem
//     D^a D^a y(t) - mu^2 y(t) = 0,  0 < t < 1,   y(0) = a, y(1) = b,
// with D^a the Caputo derivative of order a in (0, 1]. With E(z) = E_{a,1}(z),
// F(z) = E_{2a,a+1}(z), G(z) = E_{2a,1}(z):
//     C(t) = [E(mu) E(-mu t^a) - E(-mu) E(mu t^a)] / (2 mu F(mu^2))
//     S(t) = t^a F(mu^2 t^{2a}) / F(mu^2)
// and y = a C + b S. Both kernels are assembled from scaled values, so mu
// large enough to overflow E(mu) is fine.
//
// For mu < 1 the numerator of C is a difference of two numbers close to 1.
// Using E(s) + E(-s) = 2 G(s^2) and E(s) - E(-s) = 2 s F(s^2) it rewrites as
//     C(t) = G(mu^2 t^{2a}) - G(mu^2) S(t)
// which has no cancellation at small mu.

#include <cmath>
#include <string>
#include <utility>

#include "frhelm/error.hpp"
#include "frhelm/mittag_leffler.hpp"
#include "frhelm/numeric.hpp"

namespace frhelm {

struct KernelParams {
  double alpha = 1.0;
  double mu = 0.0;
};

namespace detail {

inline void validate(const KernelParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "kernel order alpha must lie in (0, 1], got " + std::to_string(p.alpha));
  }
  if (!(p.mu >= 0.0) || !std::isfinite(p.mu)) {
    throw Error(ErrorKind::InvalidParams, "kernel frequency mu must be finite and >= 0");
  }
}

inline void check_t(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::DomainError, "t must lie in [0, 1], got " + std::to_string(t));
}

inline constexpr double max_kernel_scale = 1e12;

inline Scaled ml(double alpha, double beta, double z) { return ml_eval_scaled({alpha, beta}, z).value; }

}  // namespace detail

/// Precomputed denominators for one (alpha, mu). Cheap to copy; immutable.
class Kernels {
 public:
  explicit Kernels(KernelParams p) : p_(p) {
    detail::validate(p_);
    if (p_.mu == 0.0) return;
    const double a = p_.alpha;
    const double mu2 = p_.mu * p_.mu;
    // log-scale rounding is about w * eps relative; beyond this it dominates
    if (std::pow(p_.mu, 1.0 / a) > detail::max_kernel_scale) {
      throw Error(ErrorKind::Overflow, "kernel scale mu^(1/alpha) exceeds " + std::to_string(detail::max_kernel_scale) +
                                           " for alpha = " + std::to_string(a) + ", mu = " + std::to_string(p_.mu));
    }
    e_pos_ = detail::ml(a, 1.0, p_.mu);
    e_neg_ = detail::ml(a, 1.0, -p_.mu);
    f_ = detail::ml(2.0 * a, a + 1.0, mu2);
    if (small()) g_ = detail::ml(2.0 * a, 1.0, mu2);
    // E(mu) - E(-mu) = 2 mu F(mu^2)
    den_ = f_ * (2.0 * p_.mu);
    if (!(den_.mantissa > 0.0)) {
      throw Error(ErrorKind::DegenerateSystem, "E(mu) - E(-mu) vanished for mu = " + std::to_string(p_.mu));
    }
  }

  const KernelParams& params() const { return p_; }

  double C(double t) const {
    detail::check_t(t);
    const double a = p_.alpha;
    if (t == 0.0) return 1.0;
    if (t == 1.0) return 0.0;
    const double ta = std::pow(t, a);
    if (p_.mu == 0.0) return 1.0 - ta;
    if (small()) {
      const double g_t = detail::ml(2.0 * a, 1.0, p_.mu * p_.mu * ta * ta).value();
      return g_t - g_.value() * S(t);
    }
    const Scaled lhs = e_pos_ * detail::ml(a, 1.0, -p_.mu * ta);
    const Scaled rhs = e_neg_ * detail::ml(a, 1.0, p_.mu * ta);
    return ratio(lhs - rhs, den_);
  }

  double S(double t) const {
    detail::check_t(t);
    const double a = p_.alpha;
    if (t == 0.0) return 0.0;
    if (t == 1.0) return 1.0;
    const double ta = std::pow(t, a);
    if (p_.mu == 0.0) return ta;
    return ta * ratio(detail::ml(2.0 * a, a + 1.0, p_.mu * p_.mu * ta * ta), f_);
  }

  /// E_{a,1}(mu), E_{a,1}(-mu) and E(mu) - E(-mu), in scaled form.
  Scaled e_pos() const { return e_pos_; }
  Scaled e_neg() const { return e_neg_; }
  Scaled e_diff() const { return den_; }

 private:
  bool small() const { return p_.mu < 1.0; }

  KernelParams p_;
  Scaled e_pos_;
  Scaled e_neg_;
  Scaled f_;
  Scaled g_;
  Scaled den_;
};

inline double kernel_C(KernelParams p, double t) { return Kernels(p).C(t); }

inline double kernel_S(KernelParams p, double t) { return Kernels(p).S(t); }

/// y = D1 E_{a,1}(-mu t^a) + D2 E_{a,1}(mu t^a) with y(0) = a, y(1) = b.
/// D2 is of order 1/E(mu) and underflows for large mu^(1/alpha); D2_scaled
/// keeps the full value and takes precedence when nonzero.
struct GeneralCoefficients {
  double D1 = 0.0;
  double D2 = 0.0;
  Scaled D2_scaled;

  Scaled d2() const { return D2_scaled.mantissa != 0.0 ? D2_scaled : Scaled::from(D2); }
};

inline GeneralCoefficients general_coefficients(KernelParams p, double a, double b) {
  detail::validate(p);
  if (!(p.mu > 0.0)) throw Error(ErrorKind::DegenerateSystem, "general_coefficients needs mu > 0");
  const Kernels k(p);
  const Scaled den = k.e_diff();
  GeneralCoefficients out;
  // D2 = (b - a E(-mu)) / (E(mu) - E(-mu)), D1 = (a E(mu) - b) / (E(mu) - E(-mu))
  const Scaled num2 = Scaled::from(b) - k.e_neg() * a;
  out.D2_scaled = {num2.mantissa / den.mantissa, num2.log_scale - den.log_scale};
  out.D2 = out.D2_scaled.value();
  out.D1 = ratio(k.e_pos() * a - Scaled::from(b), den);
  return out;
}

/// Evaluates the D1/D2 representation at t; an independent route to a C + b S.
inline double general_solution_value(KernelParams p, GeneralCoefficients d, double t) {
  detail::validate(p);
  detail::check_t(t);
  const double ta = std::pow(t, p.alpha);
  const Scaled up = detail::ml(p.alpha, 1.0, p.mu * ta) * d.d2();
  const Scaled down = detail::ml(p.alpha, 1.0, -p.mu * ta) * d.D1;
  return (up + down).value();
}

/// y(t) = a C(t) + b S(t).
class TwoPointSolution {
 public:
  TwoPointSolution(KernelParams p, double a, double b) : kernels_(p), a_(a), b_(b) {}

  const KernelParams& params() const { return kernels_.params(); }
  double a() const { return a_; }
  double b() const { return b_; }
  const Kernels& kernels() const { return kernels_; }

  double operator()(double t) const {
    if (a_ == 0.0 && b_ == 0.0) {
      detail::check_t(t);
      return 0.0;
    }
    double v = 0.0;
    if (a_ != 0.0) v += a_ * kernels_.C(t);
    if (b_ != 0.0) v += b_ * kernels_.S(t);
    return v;
  }

 private:
  Kernels kernels_;
  double a_;
  double b_;
};

inline TwoPointSolution solve_two_point(KernelParams p, double a, double b) { return TwoPointSolution(p, a, b); }

}  // namespace frhelm
