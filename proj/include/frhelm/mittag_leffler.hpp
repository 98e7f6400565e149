#pragma once

// Two-parameter Mittag-Leffler function E_{a,b}(z) = sum_k z^k / Gamma(a k + b)
// for real z, 0 < a <= 2, b > 0.
//
// Regimes, with w = |z|^{1/a} the natural scale of the problem:
//   * series: direct Taylor summation. For z > 0 all terms are positive. For
//     z < 0 the series alternates and loses roughly w/ln(10) digits, so the
//     double-precision sum is escalated to cpp_bin_float tiers when the
//     measured cancellation would eat the requested tolerance.
//   * asymptotic: for w >= 25 the expansion
//         E(z) ~ (1/a) z^{(1-b)/a} exp(z^{1/a}) - sum_{k=1}^p z^{-k} / Gamma(b - a k)
//     on z > 0, and only the algebraic tail on z < 0. Values on z > 0 are
//     carried as mantissa * exp(log_scale) so that exp(w) never overflows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "frhelm/error.hpp"
#include "frhelm/numeric.hpp"

namespace frhelm {

struct MLParams {
  double alpha = 1.0;
  double beta = 1.0;
};

enum class MLRegime { series, asymptotic_positive, asymptotic_negative };

inline const char* to_string(MLRegime r) {
  switch (r) {
    case MLRegime::series: return "series";
    case MLRegime::asymptotic_positive: return "asymptotic_positive";
    case MLRegime::asymptotic_negative: return "asymptotic_negative";
  }
  return "?";
}

struct MLResult {
  double value = 0.0;
  /// Truncation error of the expansion that produced `value` (last neglected
  /// term magnitude plus the rounding bound of the summation).
  double est_abs_error = 0.0;
  MLRegime regime = MLRegime::series;
  /// max |partial sum| / |final sum|; 1 for asymptotic results.
  double cancellation = 1.0;
  int terms = 0;
  /// Decimal digits of the arithmetic used (16 for plain double).
  int precision_digits = 16;
};

/// Overflow-safe variant: the value is value.mantissa * exp(value.log_scale).
struct MLScaledResult {
  Scaled value;
  double est_rel_error = 0.0;
  MLRegime regime = MLRegime::series;
  double cancellation = 1.0;
  int terms = 0;
  int precision_digits = 16;

  MLResult to_result() const {
    const double v = value.value();
    // exp(log_scale) carries the rounding of log_scale itself
    const double rounding = (std::abs(value.log_scale) + 2.0) * std::numeric_limits<double>::epsilon();
    return {v, (est_rel_error + rounding) * std::abs(v), regime, cancellation, terms, precision_digits};
  }
};

class MLNonConvergent : public Error {
 public:
  MLNonConvergent(const std::string& what, MLScaledResult best)
      : Error(ErrorKind::NonConvergent, what), best_(best) {}

  /// Best available estimate and its error bound.
  const MLScaledResult& best() const noexcept { return best_; }

 private:
  MLScaledResult best_;
};

struct MLOptions {
  double rel_tol = 1e-14;
  /// Accept a result whose absolute error is below this even if the relative
  /// criterion fails (used by the kernels, which only need absolute accuracy
  /// on exponentially small values).
  double abs_tol = 0.0;
  /// Try the asymptotic expansion once |z|^{1/a} reaches this.
  double asymptotic_from = 25.0;
  int max_asymptotic_terms = 400;
  int max_series_terms = 200000;
};

namespace detail {

inline void validate(const MLParams& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "Mittag-Leffler parameters require alpha > 0 and beta > 0");
  }
  if (p.alpha > 2.0) {
    throw Error(ErrorKind::InvalidParams, "alpha > 2 is not supported");
  }
  if (!std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
    throw Error(ErrorKind::InvalidParams, "non-finite Mittag-Leffler parameters");
  }
}

inline bool accepted(double est_abs, double value, const MLOptions& o) {
  return est_abs <= std::max(o.rel_tol * std::abs(value), o.abs_tol);
}

/// Thread-safe, append-only table of 1/Gamma(a k + b) in arithmetic T.
template <class T>
class ReciprocalGammaCache {
 public:
  using Table = std::vector<T>;

  std::shared_ptr<const Table> get(const MLParams& p, std::size_t n) {
    const Key key{p.alpha, p.beta};
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = tables_[key];
    if (!slot || slot->size() < n) {
      auto grown = std::make_shared<Table>(slot ? *slot : Table{});
      const std::size_t target = std::max(n, grown->size() * 2);
      grown->reserve(target);
      const T a(p.alpha);
      const T b(p.beta);
      for (std::size_t k = grown->size(); k < target; ++k) {
        grown->push_back(compute(a * T(k) + b));
      }
      slot = std::move(grown);
    }
    return slot;
  }

 private:
  using Key = std::pair<double, double>;

  static T compute(const T& x) {
    if constexpr (std::is_same_v<T, double>) {
      return rgamma(x);
    } else {
      return T(1) / boost::math::tgamma(x);
    }
  }

  std::mutex mu_;
  std::map<Key, std::shared_ptr<const Table>> tables_;
};

template <class T>
ReciprocalGammaCache<T>& rgamma_cache() {
  static ReciprocalGammaCache<T> cache;
  return cache;
}

struct SeriesOutcome {
  MLResult result;
  bool converged = false;
};

/// Series summation in arithmetic T. Stops once two consecutive terms are
/// below stop_tol relative to the partial sum.
template <class T>
SeriesOutcome series_in(const MLParams& p, double z, double stop_tol, int max_terms, int digits) {
  using std::abs;
  using boost::multiprecision::abs;
  SeriesOutcome out;
  const T zt(z);
  T sum(0);
  T abs_sum(0);
  T max_partial(0);
  T zk(1);
  T last(0);
  int quiet = 0;
  int k = 0;
  std::size_t chunk = 64;
  auto coef = rgamma_cache<T>().get(p, chunk);
  const T tol(stop_tol);
  for (; k < max_terms; ++k) {
    if (static_cast<std::size_t>(k) >= coef->size()) {
      chunk = coef->size() * 2;
      coef = rgamma_cache<T>().get(p, chunk);
    }
    const T term = zk * (*coef)[k];
    sum += term;
    abs_sum += abs(term);
    if (abs(sum) > max_partial) max_partial = abs(sum);
    last = abs(term);
    if (k > 0 && last <= tol * abs(sum)) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
    zk *= zt;
  }
  const double value = static_cast<double>(sum);
  const double unit = std::pow(10.0, -digits);
  out.converged = (k < max_terms);
  out.result.value = value;
  out.result.terms = k + 1;
  out.result.precision_digits = digits;
  out.result.regime = MLRegime::series;
  out.result.cancellation = (sum == 0) ? std::numeric_limits<double>::infinity()
                                       : static_cast<double>(max_partial / abs(sum));
  out.result.est_abs_error = static_cast<double>(last) + 4.0 * unit * static_cast<double>(abs_sum);
  return out;
}

/// Plain-double series with compensated accumulation. Terms are computed as
/// z^k * (1/Gamma(ak+b)) from a cached table; past the range of double they
/// fall back to exp(k log|z| - lgamma(ak+b)).
inline SeriesOutcome series_double(const MLParams& p, double z, double rel_tol, int max_terms) {
  SeriesOutcome out;
  CompensatedSum<double> sum;
  double abs_sum = 0.0;
  double max_partial = 0.0;
  double last = 0.0;
  int quiet = 0;
  int k = 0;
  std::size_t chunk = 128;
  auto coef = rgamma_cache<double>().get(p, chunk);
  const double logz = (z != 0.0) ? std::log(std::abs(z)) : 0.0;
  for (; k < max_terms; ++k) {
    if (static_cast<std::size_t>(k) >= coef->size()) {
      chunk = coef->size() * 2;
      coef = rgamma_cache<double>().get(p, chunk);
    }
    double term;
    if (k == 0) {
      term = (*coef)[0];
    } else if (z == 0.0) {
      term = 0.0;
    } else {
      const double zk = std::pow(z, k);
      const double c = (*coef)[k];
      if (std::isfinite(zk) && c != 0.0 && std::isnormal(c) && p.alpha * k + p.beta < 170.0) {
        term = zk * c;
      } else {
        const double mag = std::exp(k * logz - std::lgamma(p.alpha * k + p.beta));
        term = (z < 0.0 && (k % 2 == 1)) ? -mag : mag;
      }
    }
    sum.add(term);
    abs_sum += std::abs(term);
    const double partial = std::abs(sum.value());
    max_partial = std::max(max_partial, partial);
    last = std::abs(term);
    if (k > 0 && last <= rel_tol * partial) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
  }
  const double value = sum.value();
  out.converged = (k < max_terms) && std::isfinite(value);
  out.result.value = value;
  out.result.terms = k + 1;
  out.result.precision_digits = 16;
  out.result.regime = MLRegime::series;
  out.result.cancellation = (value == 0.0) ? std::numeric_limits<double>::infinity() : max_partial / std::abs(value);
  // Each term carries a couple of ulps from pow and the reciprocal gamma.
  out.result.est_abs_error = last + 4.0 * std::numeric_limits<double>::epsilon() * abs_sum;
  return out;
}

struct AsymptoticOutcome {
  MLScaledResult result;
  /// Absolute error relative to the mantissa scale (i.e. in units of exp(log_scale)).
  double est_abs_scaled = 0.0;
  int p = 0;
};

/// Magnitude (relative to exp(log_scale) = 1) of exponential contributions
/// that the real-axis expansion leaves out.
inline double neglected_exponentials(const MLParams& p, double z, double w) {
  const double a = p.alpha;
  const double x = std::abs(z);
  if (z > 0.0) {
    // Companion saddle at arg = 2 pi only reaches the real axis for a = 2.
    if (a >= 2.0) return (1.0 / a) * std::pow(x, (1.0 - p.beta) / a) * std::exp(-w);
    return 0.0;
  }
  // z < 0 with 2/3 < a < 1: the smoothed multiplier in saddle_terms is
  // accurate to the exp(-w) scale of the optimally truncated tail.
  if (a > 2.0 / 3.0 && a < 1.0) return (1.0 / a) * std::pow(w, 1.0 - p.beta) * std::exp(-w);
  return 0.0;
}

/// Saddle contributions on z < 0 for a > 2/3: the conjugate pair
/// t = w e^{+-i pi/a}, each (1/a) t^{1-b} e^t. For a <= 1 the negative axis
/// lies past the pair's Stokes line (arg z = a pi), and the pair carries the
/// smoothed multiplier erfc(sigma)/2 with phi = pi/a - pi and
/// sigma = sin(phi) sqrt(w / (2 cos phi)); it is 1/2 at a = 1.
inline double saddle_terms(const MLParams& p, double z, double w) {
  if (z >= 0.0 || p.alpha <= 2.0 / 3.0) return 0.0;
  const double th = pi / p.alpha;
  double weight = 2.0 / p.alpha;
  if (p.alpha <= 1.0) {
    const double phi = th - pi;
    weight *= 0.5 * std::erfc(std::sin(phi) * std::sqrt(w / (2.0 * std::cos(phi))));
  }
  return weight * std::pow(w, 1.0 - p.beta) * std::exp(w * std::cos(th)) *
         std::cos(w * std::sin(th) + th * (1.0 - p.beta));
}

/// Algebraic tail term a_k = z^{-k} / Gamma(b - a k).
inline double algebraic_term(const MLParams& p, double z, int k) {
  const double c = rgamma(p.beta - p.alpha * k);
  if (c == 0.0) return 0.0;
  return std::pow(z, -k) * c;
}

/// Asymptotic expansion. With fixed_p > 0 exactly that many correction terms
/// are used; otherwise p grows until the error estimate meets rel_tol or the
/// next-term estimate starts growing, capped at max_p.
inline AsymptoticOutcome asymptotic(const MLParams& p, double z, int fixed_p, double rel_tol, int max_p) {
  AsymptoticOutcome out;
  const double x = std::abs(z);
  const double w = std::pow(x, 1.0 / p.alpha);
  const bool positive = z > 0.0;
  // On z > 0 everything below is expressed in units of exp(w).
  const double damp = positive ? std::exp(-w) : 1.0;
  const double lead =
      positive ? (1.0 / p.alpha) * std::pow(x, (1.0 - p.beta) / p.alpha) : saddle_terms(p, z, w);
  const double expo = neglected_exponentials(p, z, w);

  CompensatedSum<double> tail;
  auto next_estimate = [&](int q) {
    return std::max(std::abs(algebraic_term(p, z, q + 1)), std::abs(algebraic_term(p, z, q + 2)));
  };

  int best_p = 1;
  double best_est = std::numeric_limits<double>::infinity();
  double best_tail = 0.0;
  double prev_est = std::numeric_limits<double>::infinity();
  const int limit = fixed_p > 0 ? fixed_p : max_p;
  for (int q = 1; q <= limit; ++q) {
    tail.add(algebraic_term(p, z, q));
    if (fixed_p > 0 && q < fixed_p) continue;
    const double est = next_estimate(q);
    const double mant = lead - damp * tail.value();
    const double total_est = damp * est + expo;
    if (fixed_p > 0 || total_est < best_est) {
      best_est = total_est;
      best_p = q;
      best_tail = tail.value();
    }
    if (fixed_p > 0) break;
    if (total_est <= rel_tol * std::abs(mant)) break;
    if (est > prev_est) break;
    prev_est = est;
  }
  const double mant = lead - damp * best_tail;
  out.p = best_p;
  out.est_abs_scaled = best_est;
  out.result.value = positive ? Scaled{mant, w} : Scaled{mant, 0.0};
  out.result.est_rel_error = (mant == 0.0) ? std::numeric_limits<double>::infinity() : best_est / std::abs(mant);
  out.result.regime = positive ? MLRegime::asymptotic_positive : MLRegime::asymptotic_negative;
  out.result.terms = best_p;
  out.result.cancellation = 1.0;
  out.result.precision_digits = 16;
  return out;
}

inline MLScaledResult from_series(const MLResult& r) {
  MLScaledResult s;
  s.value = Scaled::from(r.value);
  s.est_rel_error = (r.value == 0.0) ? (r.est_abs_error == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                     : r.est_abs_error / std::abs(r.value);
  s.regime = MLRegime::series;
  s.cancellation = r.cancellation;
  s.terms = r.terms;
  s.precision_digits = r.precision_digits;
  return s;
}

template <unsigned Digits>
using mp_float = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>,
                                               boost::multiprecision::et_off>;

struct EvalOutcome {
  MLScaledResult result;
  bool ok = false;
};

inline bool series_good(const SeriesOutcome& s, const MLOptions& o) {
  return s.converged && accepted(s.result.est_abs_error, s.result.value, o);
}

/// Series with escalating precision: double, then 50/100/200-digit floats.
/// The error estimate of each run includes the rounding bound
/// unit * sum|term|, so cancellation is accounted for directly.
inline SeriesOutcome escalated_series(const MLParams& p, double z, const MLOptions& o) {
  auto d = series_double(p, z, o.rel_tol, o.max_series_terms);
  if (z > 0.0 || (series_good(d, o) && d.result.cancellation <= 1e6)) return d;

  const double stop = o.rel_tol * 1e-3;
  const double lost = std::isfinite(d.result.cancellation) ? std::log10(std::max(1.0, d.result.cancellation)) : 300.0;
  const double want = lost - std::log10(o.rel_tol) + 6.0;
  SeriesOutcome last = d;
  if (want <= 50.0) {
    last = series_in<mp_float<50>>(p, z, stop, o.max_series_terms, 50);
    if (series_good(last, o)) return last;
  }
  if (want <= 100.0 || std::log10(last.result.cancellation) < 80.0) {
    last = series_in<mp_float<100>>(p, z, stop, o.max_series_terms, 100);
    if (series_good(last, o)) return last;
  }
  return series_in<mp_float<200>>(p, z, stop, o.max_series_terms, 200);
}

inline EvalOutcome evaluate(const MLParams& p, double z, const MLOptions& o) {
  validate(p);
  EvalOutcome out;
  if (!std::isfinite(z)) throw Error(ErrorKind::InvalidParams, "non-finite Mittag-Leffler argument");
  if (z == 0.0) {
    out.result.value = Scaled::from(rgamma(p.beta));
    out.result.regime = MLRegime::series;
    out.result.terms = 1;
    out.ok = true;
    return out;
  }
  const double w = std::pow(std::abs(z), 1.0 / p.alpha);
  std::optional<AsymptoticOutcome> asym;
  if (w >= o.asymptotic_from || (z > 0.0 && w > 600.0)) {
    asym = asymptotic(p, z, 0, o.rel_tol, o.max_asymptotic_terms);
    if (accepted(asym->est_abs_scaled, asym->result.value.mantissa, o)) {
      out.result = asym->result;
      out.ok = true;
      return out;
    }
  }
  // The positive series overflows long before w ~ 700, so past that point the
  // asymptotic form is all there is.
  if (z > 0.0 && w > 600.0) {
    out.result = asym->result;
    return out;
  }
  const auto s = escalated_series(p, z, o);
  MLScaledResult sr = from_series(s.result);
  if (series_good(s, o)) {
    out.result = sr;
    out.ok = true;
    return out;
  }
  // Neither regime met the tolerance: report whichever bound is smaller.
  out.result = (asym && asym->result.est_rel_error < sr.est_rel_error) ? asym->result : sr;
  return out;
}

}  // namespace detail

/// E_{a,b}(z) in overflow-safe form; throws MLNonConvergent when neither
/// expansion reaches the tolerance.
inline MLScaledResult ml_eval_scaled(const MLParams& params, double z, const MLOptions& opts = {}) {
  auto out = detail::evaluate(params, z, opts);
  if (!out.ok) {
    throw MLNonConvergent("E_{" + std::to_string(params.alpha) + "," + std::to_string(params.beta) + "}(" +
                              std::to_string(z) + ") did not reach tolerance",
                          out.result);
  }
  return out.result;
}

/// E_{a,b}(z) to relative accuracy rel_tol in [1e-14, 1e-6]. Values beyond
/// double range come back as +inf (use ml_eval_scaled for those).
inline MLResult ml_eval(const MLParams& params, double z, double rel_tol = 1e-14) {
  detail::validate(params);
  if (!(rel_tol >= 1e-14 && rel_tol <= 1e-6)) {
    throw Error(ErrorKind::InvalidParams, "rel_tol must lie in [1e-14, 1e-6]");
  }
  MLOptions o;
  o.rel_tol = rel_tol;
  return ml_eval_scaled(params, z, o).to_result();
}

/// Direct Taylor summation in double with compensated accumulation.
inline MLResult ml_series(const MLParams& params, double z, double rel_tol, int max_terms) {
  detail::validate(params);
  if (max_terms < 1) throw Error(ErrorKind::InvalidParams, "max_terms must be >= 1");
  auto s = detail::series_double(params, z, rel_tol, max_terms);
  if (!s.converged) {
    throw MLNonConvergent("series did not converge within " + std::to_string(max_terms) + " terms",
                          detail::from_series(s.result));
  }
  return s.result;
}

/// Asymptotic expansion with exactly p algebraic correction terms. Throws
/// OutOfRegime when the first neglected term (plus any exponential
/// contribution the real-axis form omits) exceeds rel_tol relative to the value.
inline MLResult ml_asymptotic(const MLParams& params, double z, int p, double rel_tol = 1e-6) {
  detail::validate(params);
  if (p < 1) throw Error(ErrorKind::InvalidParams, "p must be >= 1");
  if (z == 0.0) throw Error(ErrorKind::OutOfRegime, "asymptotic expansion needs z != 0");
  auto a = detail::asymptotic(params, z, p, rel_tol, p);
  if (!(a.result.est_rel_error <= rel_tol)) {
    throw Error(ErrorKind::OutOfRegime, "first neglected term exceeds requested accuracy (relative estimate " +
                                            std::to_string(a.result.est_rel_error) + ")");
  }
  return a.result.to_result();
}

}  // namespace frhelm
