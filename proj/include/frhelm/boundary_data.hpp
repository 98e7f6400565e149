#pragma once

// Boundary data phi(y), psi(y) on [-pi, pi] and their expansions in the
// eigenfunctions of the four spectral problems.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "frhelm/error.hpp"
#include "frhelm/expression.hpp"
#include "frhelm/numeric.hpp"
#include "frhelm/quadrature.hpp"
#include "frhelm/spectral_basis.hpp"

namespace frhelm {

/// Natural cubic spline through (x_i, f_i), x strictly increasing.
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> x, std::vector<double> f) : x_(std::move(x)), f_(std::move(f)) {
    const std::size_t n = x_.size();
    if (n < 4 || f_.size() != n) {
      throw Error(ErrorKind::InsufficientData, "cubic spline needs at least 4 samples with matching values");
    }
    for (std::size_t i = 1; i < n; ++i) {
      if (!(x_[i] > x_[i - 1])) throw Error(ErrorKind::InvalidParams, "spline abscissae must be strictly increasing");
    }
    // Second derivatives from the tridiagonal system, m_0 = m_{n-1} = 0.
    m_.assign(n, 0.0);
    std::vector<double> c(n, 0.0);
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];
      const double h1 = x_[i + 1] - x_[i];
      const double rhs = 6.0 * ((f_[i + 1] - f_[i]) / h1 - (f_[i] - f_[i - 1]) / h0);
      const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
      c[i] = h1 / diag;
      d[i] = (rhs - h0 * d[i - 1]) / diag;
    }
    for (std::size_t i = n - 1; i-- > 1;) m_[i] = d[i] - c[i] * m_[i + 1];
  }

  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }

  /// Value (order 0) or derivative of order 1..3 at t; t is clamped to the
  /// data range.
  double eval(double t, int order = 0) const {
    t = std::clamp(t, x_.front(), x_.back());
    std::size_t i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
    i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    const double m0 = m_[i];
    const double m1 = m_[i + 1];
    switch (order) {
      case 0:
        return a * f_[i] + b * f_[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
      case 1:
        return (f_[i + 1] - f_[i]) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
      case 2:
        return a * m0 + b * m1;
      case 3:
        return (m1 - m0) / h;
      default:
        return 0.0;
    }
  }

 private:
  std::vector<double> x_;
  std::vector<double> f_;
  std::vector<double> m_;
};

class BoundaryFunction {
 public:
  enum class Source { catalog, expression, samples };

  static constexpr int max_order = 3;

  /// The zero function.
  BoundaryFunction() : text_("0") { init_expression(expr::make_const(0.0)); }

  /// Parses `text` (grammar in expression.hpp). Derivatives are formed
  /// symbolically up to order 3 where the expression allows it.
  static BoundaryFunction from_expression(const std::string& text) {
    BoundaryFunction f;
    f.source_ = Source::expression;
    f.text_ = text;
    f.init_expression(expr::parse(text));
    return f;
  }

  /// Named entries; see catalog_names().
  static BoundaryFunction catalog(const std::string& name) {
    const auto& table = catalog_table();
    auto it = table.find(name);
    if (it == table.end()) throw Error(ErrorKind::InvalidParams, "unknown catalog function '" + name + "'");
    BoundaryFunction f;
    f.source_ = Source::catalog;
    f.text_ = name;
    f.init_expression(expr::parse(it->second));
    return f;
  }

  static std::vector<std::string> catalog_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : catalog_table()) out.push_back(k);
    return out;
  }

  static std::string catalog_expression(const std::string& name) {
    const auto& table = catalog_table();
    auto it = table.find(name);
    if (it == table.end()) throw Error(ErrorKind::InvalidParams, "unknown catalog function '" + name + "'");
    return it->second;
  }

  /// Tabulated samples interpolated by a natural cubic spline. The samples
  /// must be strictly increasing in y and cover [-pi, pi].
  static BoundaryFunction from_samples(std::vector<double> y, std::vector<double> v, std::string label = "samples") {
    constexpr double slack = 1e-9;
    if (y.size() < 4) throw Error(ErrorKind::InsufficientData, "boundary samples need at least 4 points");
    if (y.front() > -pi + slack || y.back() < pi - slack) {
      throw Error(ErrorKind::InvalidParams, "boundary samples must span [-pi, pi]");
    }
    BoundaryFunction f;
    f.source_ = Source::samples;
    f.text_ = std::move(label);
    f.spline_ = std::make_shared<const CubicSpline>(std::move(y), std::move(v));
    f.available_order_ = max_order;
    return f;
  }

  /// Two-column CSV `y,value`. Lines starting with '#' and a non-numeric
  /// header line are skipped.
  static BoundaryFunction from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open boundary data file '" + path + "'");
    std::vector<double> ys;
    std::vector<double> vs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) {
        throw Error(ErrorKind::InvalidParams, path + ":" + std::to_string(lineno) + ": expected 'y,value'");
      }
      char* end = nullptr;
      const std::string a = line.substr(0, comma);
      const std::string b = line.substr(comma + 1);
      const double y = std::strtod(a.c_str(), &end);
      const bool numeric = end != a.c_str();
      if (!numeric) {
        if (ys.empty()) continue;  // header
        throw Error(ErrorKind::InvalidParams, path + ":" + std::to_string(lineno) + ": non-numeric y");
      }
      const double v = std::strtod(b.c_str(), &end);
      if (end == b.c_str()) {
        throw Error(ErrorKind::InvalidParams, path + ":" + std::to_string(lineno) + ": non-numeric value");
      }
      ys.push_back(y);
      vs.push_back(v);
    }
    return from_samples(std::move(ys), std::move(vs), path);
  }

  Source source() const { return source_; }

  /// Expression text, catalog name or file name.
  const std::string& text() const { return text_; }

  /// Highest derivative order that can be queried (0 means values only).
  int available_order() const { return available_order_; }

  /// True when derivatives come from a spline rather than from a formula.
  bool derivatives_from_spline() const { return source_ == Source::samples; }

  double operator()(double y) const { return derivative(y, 0); }

  double derivative(double y, int order) const {
    check_domain(y);
    if (order < 0 || order > available_order_) {
      throw Error(ErrorKind::DifferentiationUnsupported,
                  "derivative of order " + std::to_string(order) + " is not available for '" + text_ + "'" +
                      (why_.empty() ? "" : " (" + why_ + ")"));
    }
    if (spline_) return spline_->eval(y, order);
    return expr::eval(*derivs_[order], y);
  }

  /// Symbolic form of derivative `order` (expression sources only).
  std::string derivative_text(int order) const {
    if (spline_ || order > available_order_) return {};
    return expr::to_string(derivs_[order]);
  }

 private:
  static const std::map<std::string, std::string>& catalog_table() {
    static const std::map<std::string, std::string> table = {
        {"zero", "0"},
        {"one", "1"},
        {"sin", "sin(y)"},
        {"cubic", "y*(pi^2 - y^2)"},
        {"quartic", "(y^2 - pi^2)^2"},
        {"exp_sin", "exp(sin(y))"},
        {"half_sin_exp_cos", "sin(y/2)*exp(cos(y))"},
    };
    return table;
  }

  void init_expression(expr::NodePtr root) {
    derivs_[0] = std::move(root);
    available_order_ = 0;
    for (int k = 1; k <= max_order; ++k) {
      try {
        derivs_[k] = expr::derivative(derivs_[k - 1]);
        available_order_ = k;
      } catch (const Error& e) {
        why_ = e.what();
        break;
      }
    }
  }

  static void check_domain(double y) {
    if (!(std::abs(y) <= pi * (1.0 + 1e-12))) {
      throw Error(ErrorKind::DomainError, "boundary functions live on [-pi, pi], got y = " + std::to_string(y));
    }
  }

  Source source_ = Source::expression;
  std::string text_;
  std::array<expr::NodePtr, max_order + 1> derivs_{};
  std::shared_ptr<const CubicSpline> spline_;
  int available_order_ = 0;
  std::string why_;
};

inline const char* to_string(BoundaryFunction::Source s) {
  switch (s) {
    case BoundaryFunction::Source::catalog: return "catalog";
    case BoundaryFunction::Source::expression: return "expression";
    case BoundaryFunction::Source::samples: return "samples";
  }
  return "?";
}

struct CoefficientResult {
  double value = 0.0;
  /// |c(P panels) - c(2P panels)|; `value` is the 2P result.
  double est_error = 0.0;
  /// Fewer than 4 nodes per unit wavenumber on the coarse rule.
  bool aliasing_risk = false;
  int nodes = 0;
};

inline bool aliasing_rule_violated(const CompositeRule& r, double omega) {
  return static_cast<double>(r.size()) < 4.0 * omega;
}

/// (f, Y_mode) on [-pi, pi] by composite Gauss-Legendre.
inline CoefficientResult fourier_coefficient(const BoundaryFunction& f, const ModeIndex& mode, const QuadSpec& q = {}) {
  const Eigenfunction Y(mode);
  const CompositeRule coarse = composite_rule(q, Y.omega());
  const CompositeRule fine = composite_rule(coarse.panels * 2, coarse.order);
  const auto integrand = [&](double y) { return f(y) * Y(y); };
  CoefficientResult out;
  const double c1 = integrate(coarse, integrand);
  out.value = integrate(fine, integrand);
  out.est_error = std::abs(out.value - c1);
  out.aliasing_risk = aliasing_rule_violated(coarse, Y.omega());
  out.nodes = static_cast<int>(fine.size());
  return out;
}

/// Coefficients of one function for all modes with k <= N, in the canonical
/// order of enumerate_modes().
struct CoefficientTable {
  ProblemKind kind = ProblemKind::Dirichlet;
  int N = 0;
  std::vector<ModeIndex> modes;
  std::vector<double> values;
  /// Per-mode |c(P) - c(2P)|.
  std::vector<double> errors;
  int panels = 0;  // of the reported (fine) rule
  int order = 0;
  int nodes = 0;
  double quad_error = 0.0;  // max of errors
  bool aliasing_risk = false;
  /// Integral of f^2 over [-pi, pi] on the fine rule.
  double norm_sq = 0.0;
  /// norm_sq - sum of squares; Bessel's inequality says this is >= 0 up to
  /// quadrature error.
  double parseval_defect = 0.0;

  std::size_t size() const { return modes.size(); }

  std::size_t index_of(const ModeIndex& m) const {
    if (m.kind != kind || !m.valid() || m.k > N) {
      throw Error(ErrorKind::UnknownMode, to_string(m) + " is not in this table");
    }
    const int odd_count = N - k_min(kind, Parity::odd) + 1;
    if (m.parity == Parity::odd) return static_cast<std::size_t>(m.k - k_min(kind, Parity::odd));
    return static_cast<std::size_t>(odd_count + m.k - k_min(kind, Parity::even));
  }

  double at(const ModeIndex& m) const { return values[index_of(m)]; }

  /// sum of squares of the coefficients, fixed order
  double sum_sq() const {
    CompensatedSum<double> s;
    for (double v : values) s.add(v * v);
    return s.value();
  }

  /// Truncated series sum_mode c_mode Y_mode(y).
  double reconstruct(double y) const {
    CompensatedSum<double> s;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (values[i] != 0.0) s.add(values[i] * Eigenfunction(modes[i])(y));
    }
    return s.value();
  }
};

/// Expands f in the kind's eigenfunctions, k <= N. One rule serves all
/// modes; it is sized for the largest wavenumber.
inline CoefficientTable expand(const BoundaryFunction& f, ProblemKind kind, int N, const QuadSpec& q = {}) {
  if (N < 1) throw Error(ErrorKind::InvalidParams, "truncation N must be >= 1");
  CoefficientTable t;
  t.kind = kind;
  t.N = N;
  t.modes = enumerate_modes(kind, N);
  double omega_max = 0.0;
  for (const auto& m : t.modes) omega_max = std::max(omega_max, wavenumber(m));
  const CompositeRule coarse = composite_rule(q, omega_max);
  const CompositeRule fine = composite_rule(coarse.panels * 2, coarse.order);
  t.panels = fine.panels;
  t.order = fine.order;
  t.nodes = static_cast<int>(fine.size());
  t.aliasing_risk = aliasing_rule_violated(coarse, omega_max);

  auto sample = [&](const CompositeRule& r) {
    std::vector<double> v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) v[i] = f(r.nodes[i]);
    return v;
  };
  const std::vector<double> fc = sample(coarse);
  const std::vector<double> ff = sample(fine);

  auto project = [](const CompositeRule& r, const std::vector<double>& fv, const Eigenfunction& Y) {
    CompensatedSum<double> s;
    for (std::size_t i = 0; i < r.size(); ++i) s.add(r.weights[i] * fv[i] * Y(r.nodes[i]));
    return s.value();
  };

  t.values.resize(t.modes.size());
  t.errors.resize(t.modes.size());
  for (std::size_t i = 0; i < t.modes.size(); ++i) {
    const Eigenfunction Y(t.modes[i]);
    const double c2 = project(fine, ff, Y);
    const double c1 = project(coarse, fc, Y);
    t.values[i] = c2;
    t.errors[i] = std::abs(c2 - c1);
    t.quad_error = std::max(t.quad_error, t.errors[i]);
  }
  CompensatedSum<double> nsq;
  for (std::size_t i = 0; i < fine.size(); ++i) nsq.add(fine.weights[i] * ff[i] * ff[i]);
  t.norm_sq = nsq.value();
  t.parseval_defect = t.norm_sq - t.sum_sq();
  return t;
}

struct CompatibilityCondition {
  std::string name;      // e.g. "phi(-pi) = 0"
  double mismatch = 0.0;
  bool pass = true;
};

struct CompatibilityReport {
  ProblemKind kind = ProblemKind::Dirichlet;
  double tol = 0.0;
  std::vector<CompatibilityCondition> conditions;
  std::vector<std::string> warnings;
  bool pass = true;

  std::string summary() const {
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (const auto& c : conditions) {
      if (c.pass) continue;
      if (!first) os << "; ";
      os << c.name << " violated, mismatch " << c.mismatch;
      first = false;
    }
    return first ? "all compatibility conditions hold" : os.str();
  }
};

/// Endpoint conditions the series solution needs for each problem kind:
///   D : f(-pi) = f(pi) = 0
///   N : f'(-pi) = f'(pi) = 0
///   P : f(-pi) = f(pi),  f'(-pi) = f'(pi)
///   AP: f(-pi) = -f(pi), f'(-pi) = -f'(pi)
/// for both f = phi and f = psi.
inline CompatibilityReport compatibility_check(const BoundaryFunction& phi, const BoundaryFunction& psi,
                                               ProblemKind kind, double tol) {
  CompatibilityReport r;
  r.kind = kind;
  r.tol = tol;
  auto add = [&](const std::string& name, double mismatch) {
    const bool ok = mismatch <= tol;
    r.conditions.push_back({name, mismatch, ok});
    r.pass = r.pass && ok;
  };
  for (int which = 0; which < 2; ++which) {
    const BoundaryFunction& f = which == 0 ? phi : psi;
    const std::string n = which == 0 ? "phi" : "psi";
    const double lo = -pi;
    const double hi = pi;
    switch (kind) {
      case ProblemKind::Dirichlet:
        add(n + "(-pi) = 0", std::abs(f(lo)));
        add(n + "(pi) = 0", std::abs(f(hi)));
        break;
      case ProblemKind::Neumann:
        add(n + "'(-pi) = 0", std::abs(f.derivative(lo, 1)));
        add(n + "'(pi) = 0", std::abs(f.derivative(hi, 1)));
        break;
      case ProblemKind::Periodic:
        add(n + "(-pi) = " + n + "(pi)", std::abs(f(lo) - f(hi)));
        add(n + "'(-pi) = " + n + "'(pi)", std::abs(f.derivative(lo, 1) - f.derivative(hi, 1)));
        break;
      case ProblemKind::AntiPeriodic:
        add(n + "(-pi) = -" + n + "(pi)", std::abs(f(lo) + f(hi)));
        add(n + "'(-pi) = -" + n + "'(pi)", std::abs(f.derivative(lo, 1) + f.derivative(hi, 1)));
        break;
    }
    if (kind != ProblemKind::Dirichlet && f.derivatives_from_spline()) {
      r.warnings.push_back(n + ": derivative conditions use spline derivatives of tabulated data");
    }
  }
  return r;
}

struct FamilyDecay {
  Parity parity = Parity::odd;
  double slope = 0.0;  // of log|c| against log k
  int k_lo = 0;
  int k_hi = 0;
  int points = 0;
};

struct DecayEstimate {
  std::optional<FamilyDecay> odd;
  std::optional<FamilyDecay> even;
};

namespace detail {

inline std::optional<FamilyDecay> fit_family(const CoefficientTable& t, Parity parity, double floor) {
  std::vector<int> ks;
  std::vector<double> cs;
  for (std::size_t i = 0; i < t.modes.size(); ++i) {
    if (t.modes[i].parity != parity || t.modes[i].k < 1) continue;
    ks.push_back(t.modes[i].k);
    cs.push_back(std::abs(t.values[i]));
  }
  // Drop the noise tail, then take the widest window [2^j, K] whose entries
  // are all above the floor.
  std::size_t last = cs.size();
  while (last > 0 && !(cs[last - 1] > floor)) --last;
  if (last == 0) return std::nullopt;
  const int K = ks[last - 1];
  std::optional<std::size_t> start;
  for (int lo = 1; lo <= K; lo *= 2) {
    bool ok = true;
    std::size_t first = last;
    for (std::size_t i = 0; i < last; ++i) {
      if (ks[i] < lo) continue;
      first = std::min(first, i);
      if (!(cs[i] > floor)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      start = first;
      break;
    }
  }
  if (!start || last - *start < 8) return std::nullopt;
  // least squares on (log k, log|c|)
  const std::size_t n = last - *start;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = *start; i < last; ++i) {
    const double x = std::log(static_cast<double>(ks[i]));
    const double y = std::log(cs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  FamilyDecay d;
  d.parity = parity;
  d.slope = (n * sxy - sx * sy) / den;
  d.k_lo = ks[*start];
  d.k_hi = K;
  d.points = static_cast<int>(n);
  return d;
}

}  // namespace detail

/// Power-law decay exponent of each parity family. Entries at or below the
/// noise floor max(1e-13 max|c|, 10 quad_error) count as zero.
inline DecayEstimate decay_estimate(const CoefficientTable& t) {
  double cmax = 0.0;
  for (double v : t.values) cmax = std::max(cmax, std::abs(v));
  const double floor = std::max(1e-13 * cmax, 10.0 * t.quad_error);
  DecayEstimate e;
  e.odd = detail::fit_family(t, Parity::odd, floor);
  e.even = detail::fit_family(t, Parity::even, floor);
  if (!e.odd && !e.even) {
    throw Error(ErrorKind::InsufficientData, "decay estimate needs at least 8 nonzero coefficients in a family");
  }
  return e;
}

/// Warnings when a fitted slope is flatter than a stated class C^{s}
/// would give (|c_k| = O(k^{-s})), with 0.3 of slack.
inline std::vector<std::string> smoothness_warnings(const DecayEstimate& d, double s) {
  std::vector<std::string> out;
  for (const auto* f : {&d.odd, &d.even}) {
    if (!*f) continue;
    if ((*f)->slope > -s + 0.3) {
      std::ostringstream os;
      os.precision(4);
      os << to_string((*f)->parity) << " coefficients decay like k^" << (*f)->slope << ", slower than the k^-" << s
         << " expected for the stated smoothness";
      out.push_back(os.str());
    }
  }
  return out;
}

}  // namespace frhelm
