#pragma once

// Composite Gauss-Legendre rules on [-pi, pi].

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "frhelm/error.hpp"
#include "frhelm/numeric.hpp"

namespace frhelm {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

namespace detail {

// Newton on P_n from the usual cosine initial guess; only the upper half is
// computed and mirrored, so the rule is exactly symmetric.
inline GaussRule compute_gauss_legendre(int n) {
  GaussRule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  // P_n(x) and P_n'(x) by the three-term recurrence
  auto legendre = [n](double x, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[n - 1 - i] = x;
    r.nodes[i] = -x;
    r.weights[n - 1 - i] = w;
    r.weights[i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1]; cached, thread-safe.
inline const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidParams, "Gauss-Legendre order must be >= 1");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(detail::compute_gauss_legendre(n));
  return *slot;
}

struct QuadSpec {
  /// Number of equal panels on [-pi, pi]; 0 picks one from the largest
  /// wavenumber involved. Rounded up to an even count.
  int panels = 0;
  int order = 16;
};

/// Nodes and weights of a composite rule on [-pi, pi], symmetric about 0.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int panels = 0;
  int order = 0;

  std::size_t size() const { return nodes.size(); }
};

/// Panel count used for an integrand oscillating at wavenumber omega_max:
/// about four radians of phase per 16-point panel.
inline int auto_panels(double omega_max) {
  int p = std::max(8, static_cast<int>(std::ceil(omega_max * 2.0 * pi / 4.0)));
  return p + (p % 2);
}

inline CompositeRule composite_rule(int panels, int order) {
  if (panels < 2) throw Error(ErrorKind::InvalidParams, "composite rule needs at least 2 panels");
  if (panels % 2) ++panels;
  const GaussRule& g = gauss_legendre(order);
  CompositeRule r;
  r.panels = panels;
  r.order = order;
  const int half = panels / 2;
  const double h = pi / half;
  std::vector<double> xs;
  std::vector<double> ws;
  for (int p = 0; p < half; ++p) {
    const double a = p * h;
    for (int i = 0; i < order; ++i) {
      xs.push_back(a + 0.5 * h * (g.nodes[i] + 1.0));
      ws.push_back(0.5 * h * g.weights[i]);
    }
  }
  r.nodes.reserve(2 * xs.size());
  r.weights.reserve(2 * xs.size());
  for (std::size_t i = xs.size(); i-- > 0;) {
    r.nodes.push_back(-xs[i]);
    r.weights.push_back(ws[i]);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    r.nodes.push_back(xs[i]);
    r.weights.push_back(ws[i]);
  }
  return r;
}

inline CompositeRule composite_rule(const QuadSpec& q, double omega_max) {
  return composite_rule(q.panels > 0 ? q.panels : auto_panels(omega_max), q.order);
}

/// Integral over [-pi, pi] of the values f(nodes[i]) already sampled on `r`,
/// in fixed node order with compensated accumulation.
inline double integrate_samples(const CompositeRule& r, const std::vector<double>& values) {
  CompensatedSum<double> s;
  for (std::size_t i = 0; i < r.size(); ++i) s.add(r.weights[i] * values[i]);
  return s.value();
}

template <class F>
double integrate(const CompositeRule& r, F&& f) {
  CompensatedSum<double> s;
  for (std::size_t i = 0; i < r.size(); ++i) s.add(r.weights[i] * f(r.nodes[i]));
  return s.value();
}

}  // namespace frhelm
