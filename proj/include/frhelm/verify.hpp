#pragma once

// Independent checks on assembled solutions: discrete Caputo derivatives,
// PDE residuals of the sampled field, boundary errors, kernel bounds and
// orthonormality of the bases.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "frhelm/boundary_data.hpp"
#include "frhelm/error.hpp"
#include "frhelm/frac_kernels.hpp"
#include "frhelm/numeric.hpp"
#include "frhelm/parallel.hpp"
#include "frhelm/quadrature.hpp"
#include "frhelm/solver.hpp"
#include "frhelm/spectral_basis.hpp"

namespace frhelm {

namespace detail {

inline void check_caputo_input(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "Caputo order must lie in (0, 1], got " + std::to_string(alpha));
  }
  if (n < 5) throw Error(ErrorKind::GridTooCoarse, "Caputo grid needs M >= 4 (at least 5 samples)");
}

/// f' on a uniform grid: centered inside, second-order one-sided at the ends.
inline std::vector<double> first_difference(std::span<const double> f, double h) {
  const std::size_t M = f.size() - 1;
  std::vector<double> d(f.size());
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t n = 1; n < M; ++n) d[n] = (f[n + 1] - f[n - 1]) / (2.0 * h);
  d[M] = (3.0 * f[M] - 4.0 * f[M - 1] + f[M - 2]) / (2.0 * h);
  return d;
}

/// f'' on a uniform grid: centered inside, second-order one-sided at the ends.
inline std::vector<double> second_difference(std::span<const double> f, double h) {
  const std::size_t M = f.size() - 1;
  const double h2 = h * h;
  std::vector<double> d(f.size());
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  for (std::size_t n = 1; n < M; ++n) d[n] = (f[n + 1] - 2.0 * f[n] + f[n - 1]) / h2;
  d[M] = (2.0 * f[M] - 5.0 * f[M - 1] + 4.0 * f[M - 2] - f[M - 3]) / h2;
  return d;
}

inline std::vector<double> l1_weights(std::size_t M, double alpha) {
  std::vector<double> b(M);
  for (std::size_t j = 0; j < M; ++j) {
    b[j] = std::pow(static_cast<double>(j + 1), 1.0 - alpha) - std::pow(static_cast<double>(j), 1.0 - alpha);
  }
  return b;
}

inline std::vector<double> l1_apply(std::span<const double> f, const std::vector<double>& b, double scale) {
  const std::size_t M = f.size() - 1;
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t n = 1; n <= M; ++n) {
    CompensatedSum<double> s;
    for (std::size_t j = 0; j < n; ++j) s.add(b[j] * (f[n - j] - f[n - j - 1]));
    out[n] = scale * s.value();
  }
  return out;
}

}  // namespace detail

/// L1 approximation of the Caputo derivative of order alpha at every node
/// of the uniform grid t_n = n/M (samples.size() = M + 1). Node 0 gets 0.
/// alpha = 1 falls back to second-order finite differences.
inline std::vector<double> caputo_l1(std::span<const double> samples, double alpha) {
  detail::check_caputo_input(samples.size(), alpha);
  const std::size_t M = samples.size() - 1;
  const double h = 1.0 / static_cast<double>(M);
  if (alpha == 1.0) return detail::first_difference(samples, h);
  const double scale = std::pow(h, -alpha) / std::tgamma(2.0 - alpha);
  return detail::l1_apply(samples, detail::l1_weights(M, alpha), scale);
}

/// L1 with starting weights: at every node n the result is corrected by
/// w_{n,1}(f_1 - f_0) + w_{n,2}(f_2 - f_0) so that t^alpha and t^{2 alpha}
/// are differentiated exactly. Node 0 receives the corrected value too, so
/// the output can be differentiated again.
class CorrectedL1 {
 public:
  CorrectedL1(std::size_t samples, double alpha) : alpha_(alpha) {
    detail::check_caputo_input(samples, alpha);
    M_ = samples - 1;
    h_ = 1.0 / static_cast<double>(M_);
    if (alpha_ == 1.0) return;
    b_ = detail::l1_weights(M_, alpha_);
    scale_ = std::pow(h_, -alpha_) / std::tgamma(2.0 - alpha_);
    const double s1 = alpha_;
    const double s2 = 2.0 * alpha_;
    std::vector<double> p1(M_ + 1);
    std::vector<double> p2(M_ + 1);
    for (std::size_t n = 0; n <= M_; ++n) {
      const double t = n * h_;
      p1[n] = std::pow(t, s1);
      p2[n] = std::pow(t, s2);
    }
    const auto l1_p1 = detail::l1_apply(p1, b_, scale_);
    const auto l1_p2 = detail::l1_apply(p2, b_, scale_);
    // exact D^alpha t^s = Gamma(s+1)/Gamma(s+1-alpha) t^{s-alpha}
    const double g1 = std::tgamma(s1 + 1.0) / std::tgamma(s1 + 1.0 - alpha_);
    const double g2 = std::tgamma(s2 + 1.0) / std::tgamma(s2 + 1.0 - alpha_);
    // A w = r with A = [[t1^s1, t2^s1], [t1^s2, t2^s2]]
    const double a11 = p1[1];
    const double a12 = p1[2];
    const double a21 = p2[1];
    const double a22 = p2[2];
    const double det = a11 * a22 - a12 * a21;
    w1_.resize(M_ + 1);
    w2_.resize(M_ + 1);
    for (std::size_t n = 0; n <= M_; ++n) {
      const double t = n * h_;
      const double r1 = g1 * std::pow(t, s1 - alpha_) - l1_p1[n];  // t^0 = 1, also at t = 0
      const double r2 = g2 * std::pow(t, s2 - alpha_) - l1_p2[n];
      w1_[n] = (r1 * a22 - a12 * r2) / det;
      w2_[n] = (a11 * r2 - a21 * r1) / det;
    }
  }

  std::vector<double> apply(std::span<const double> f) const {
    if (f.size() != M_ + 1) throw Error(ErrorKind::InvalidParams, "sample count does not match the prepared grid");
    if (alpha_ == 1.0) return detail::first_difference(f, h_);
    std::vector<double> out = detail::l1_apply(f, b_, scale_);
    const double d1 = f[1] - f[0];
    const double d2 = f[2] - f[0];
    for (std::size_t n = 0; n <= M_; ++n) out[n] += w1_[n] * d1 + w2_[n] * d2;
    return out;
  }

 private:
  double alpha_;
  std::size_t M_ = 0;
  double h_ = 0.0;
  double scale_ = 0.0;
  std::vector<double> b_;
  std::vector<double> w1_;
  std::vector<double> w2_;
};

inline std::vector<double> caputo_l1_corrected(std::span<const double> samples, double alpha) {
  return CorrectedL1(samples.size(), alpha).apply(samples);
}

/// Nodes 0, 1 and 2 of a composed derivative are not trusted.
inline constexpr std::size_t composed_first_valid = 3;

/// D^alpha D^alpha by two applications of the corrected L1 scheme; the
/// second difference at alpha = 1.
class ComposedCaputo {
 public:
  ComposedCaputo(std::size_t samples, double alpha)
      : alpha_(alpha), samples_(samples), op_(samples, alpha) {}

  std::vector<double> apply(std::span<const double> f) const {
    if (alpha_ == 1.0) {
      if (f.size() != samples_) throw Error(ErrorKind::InvalidParams, "sample count does not match the prepared grid");
      return detail::second_difference(f, 1.0 / static_cast<double>(samples_ - 1));
    }
    return op_.apply(op_.apply(f));
  }

 private:
  double alpha_;
  std::size_t samples_;
  CorrectedL1 op_;
};

inline std::vector<double> composed_caputo(std::span<const double> samples, double alpha) {
  return ComposedCaputo(samples.size(), alpha).apply(samples);
}

struct ResidualTerms {
  double fractional = 0.0;  // max |D^a D^a u|
  double u_yy = 0.0;        // max |u_yy(x, y)|
  double involution = 0.0;  // max |eps u_yy(x, -y)|
  double helmholtz = 0.0;   // max |c^2 u|
};

struct BoundaryCondition {
  std::string name;
  double error = 0.0;
};

struct BoundaryReport {
  double x0_error = 0.0;  // max_y |u(0,y) - phi(y)|
  double x1_error = 0.0;  // max_y |u(1,y) - psi(y)|
  std::vector<BoundaryCondition> side;  // y = -pi, pi conditions, max over x
  int ny = 0;

  double side_max() const {
    double m = 0.0;
    for (const auto& c : side) m = std::max(m, c.error);
    return m;
  }
  double max_error() const { return std::max({x0_error, x1_error, side_max()}); }
};

struct ResidualReport {
  int nx = 0;
  int ny = 0;
  double hx = 0.0;
  double hy = 0.0;
  double max_abs = 0.0;
  /// sqrt(hx hy sum r^2) over the probe set
  double l2 = 0.0;
  ResidualTerms terms;
  /// Probes use x_j with j >= first_x_probe (x < excluded_x is skipped) and
  /// exclude x = 1 and the y endpoints.
  std::size_t first_x_probe = composed_first_valid;
  double excluded_x = 0.0;
  std::optional<BoundaryReport> boundary;
};

/// Residual of the PDE on a sampled field with uniform x nodes on [0, 1]
/// and a uniform y grid symmetric about 0.
inline ResidualReport residual_from_field(const Field& f, double alpha, double eps, double c, int threads = 1) {
  const std::size_t nx = f.nx();
  const std::size_t ny = f.ny();
  if (nx < 33 || ny < 32) throw Error(ErrorKind::GridTooCoarse, "residual needs nx >= 33 and ny >= 32");
  for (std::size_t i = 0; i < ny; ++i) {
    if (std::abs(f.y[i] + f.y[ny - 1 - i]) > 1e-12) {
      throw Error(ErrorKind::AsymmetricGrid, "y grid must be symmetric about 0 so that -y is a grid node");
    }
  }
  const double hx = 1.0 / static_cast<double>(nx - 1);
  const double hy = (f.y.back() - f.y.front()) / static_cast<double>(ny - 1);
  ResidualReport r;
  r.nx = static_cast<int>(nx);
  r.ny = static_cast<int>(ny);
  r.hx = hx;
  r.hy = hy;
  r.excluded_x = f.x[composed_first_valid];

  // fractional term along each y line
  std::vector<double> frac(nx * ny);
  const ComposedCaputo op(nx, alpha);
  parallel_for(ny, threads, [&](std::size_t iy) {
    std::vector<double> line(nx);
    for (std::size_t ix = 0; ix < nx; ++ix) line[ix] = f.at(ix, iy);
    const auto d = op.apply(line);
    for (std::size_t ix = 0; ix < nx; ++ix) frac[ix * ny + iy] = d[ix];
  });
  auto uyy = [&](std::size_t ix, std::size_t iy) {
    return (f.at(ix, iy + 1) - 2.0 * f.at(ix, iy) + f.at(ix, iy - 1)) / (hy * hy);
  };

  // per-row partial results, reduced in row order afterwards
  struct Row {
    double max_abs = 0.0;
    double sum_sq = 0.0;
    ResidualTerms terms;
  };
  std::vector<Row> rows(nx);
  parallel_for(nx, threads, [&](std::size_t ix) {
    if (ix < composed_first_valid || ix + 1 >= nx) return;
    Row& row = rows[ix];
    CompensatedSum<double> ss;
    for (std::size_t iy = 1; iy + 1 < ny; ++iy) {
      const std::size_t mirror = ny - 1 - iy;
      const double t_frac = frac[ix * ny + iy];
      const double t_yy = uyy(ix, iy);
      const double t_inv = eps * uyy(ix, mirror);
      const double t_c = c * c * f.at(ix, iy);
      const double res = t_frac + t_yy - t_inv - t_c;
      row.max_abs = std::max(row.max_abs, std::abs(res));
      ss.add(res * res);
      row.terms.fractional = std::max(row.terms.fractional, std::abs(t_frac));
      row.terms.u_yy = std::max(row.terms.u_yy, std::abs(t_yy));
      row.terms.involution = std::max(row.terms.involution, std::abs(t_inv));
      row.terms.helmholtz = std::max(row.terms.helmholtz, std::abs(t_c));
    }
    row.sum_sq = ss.value();
  });
  CompensatedSum<double> total;
  for (const Row& row : rows) {
    r.max_abs = std::max(r.max_abs, row.max_abs);
    total.add(row.sum_sq);
    r.terms.fractional = std::max(r.terms.fractional, row.terms.fractional);
    r.terms.u_yy = std::max(r.terms.u_yy, row.terms.u_yy);
    r.terms.involution = std::max(r.terms.involution, row.terms.involution);
    r.terms.helmholtz = std::max(r.terms.helmholtz, row.terms.helmholtz);
  }
  r.l2 = std::sqrt(hx * hy * total.value());
  return r;
}

/// Boundary errors of the assembled series on an ny-point y grid. The side
/// conditions hold mode by mode, so their x grid is capped at
/// side_x_points_max nodes.
inline constexpr int side_x_points_max = 257;

inline BoundaryReport boundary_report(const Solution& sol, const ProblemSpec& spec, int ny) {
  if (ny < 16) throw Error(ErrorKind::GridTooCoarse, "boundary report needs ny >= 16");
  BoundaryReport b;
  b.ny = ny;
  const auto ys = symmetric_y(ny);
  const auto xs = uniform_x(std::min(ny, side_x_points_max));
  const Field edges = sol.evaluate_on({0.0, 1.0}, ys);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    b.x0_error = std::max(b.x0_error, std::abs(edges.at(0, i) - spec.phi(ys[i])));
    b.x1_error = std::max(b.x1_error, std::abs(edges.at(1, i) - spec.psi(ys[i])));
  }
  const Field u = sol.evaluate_on(xs, {-pi, pi});
  auto max_over_x = [&](auto&& g) {
    double m = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) m = std::max(m, std::abs(g(j)));
    return m;
  };
  switch (spec.kind) {
    case ProblemKind::Dirichlet:
      b.side.push_back({"u(x,-pi) = 0", max_over_x([&](std::size_t j) { return u.at(j, 0); })});
      b.side.push_back({"u(x,pi) = 0", max_over_x([&](std::size_t j) { return u.at(j, 1); })});
      break;
    case ProblemKind::Neumann: {
      const Field d = sol.evaluate_on(xs, {-pi, pi}, 1);
      b.side.push_back({"u_y(x,-pi) = 0", max_over_x([&](std::size_t j) { return d.at(j, 0); })});
      b.side.push_back({"u_y(x,pi) = 0", max_over_x([&](std::size_t j) { return d.at(j, 1); })});
      break;
    }
    case ProblemKind::Periodic: {
      const Field d = sol.evaluate_on(xs, {-pi, pi}, 1);
      b.side.push_back({"u(x,-pi) = u(x,pi)", max_over_x([&](std::size_t j) { return u.at(j, 0) - u.at(j, 1); })});
      b.side.push_back(
          {"u_y(x,-pi) = u_y(x,pi)", max_over_x([&](std::size_t j) { return d.at(j, 0) - d.at(j, 1); })});
      break;
    }
    case ProblemKind::AntiPeriodic: {
      const Field d = sol.evaluate_on(xs, {-pi, pi}, 1);
      b.side.push_back({"u(x,-pi) = -u(x,pi)", max_over_x([&](std::size_t j) { return u.at(j, 0) + u.at(j, 1); })});
      b.side.push_back(
          {"u_y(x,-pi) = -u_y(x,pi)", max_over_x([&](std::size_t j) { return d.at(j, 0) + d.at(j, 1); })});
      break;
    }
  }
  return b;
}

/// Residual of the assembled solution on an nx by ny grid.
inline ResidualReport pde_residual(const Solution& sol, int nx, int ny) {
  if (nx < 33 || ny < 32) throw Error(ErrorKind::GridTooCoarse, "residual needs nx >= 33 and ny >= 32");
  const Field f = sol.evaluate_grid(nx, ny);
  const ProblemSpec& s = sol.spec();
  return residual_from_field(f, s.alpha, s.eps, s.c, s.threads);
}

struct LadderLevel {
  int M = 0;
  double h = 0.0;
  double max_residual = 0.0;
  double l2_residual = 0.0;
  /// log2 of the residual ratio to the previous level; NaN on the first.
  double observed_order = std::numeric_limits<double>::quiet_NaN();
};

/// Ladder levels from residual reports on successively finer square grids.
inline std::vector<LadderLevel> ladder_from_reports(const std::vector<ResidualReport>& reports) {
  std::vector<LadderLevel> out;
  for (const ResidualReport& r : reports) {
    LadderLevel lv;
    lv.M = r.nx - 1;
    lv.h = 1.0 / lv.M;
    lv.max_residual = r.max_abs;
    lv.l2_residual = r.l2;
    if (!out.empty()) {
      lv.observed_order = std::log(out.back().max_residual / lv.max_residual) / std::log(lv.M / double(out.back().M));
    }
    out.push_back(lv);
  }
  return out;
}

/// pde_residual at nx = ny = M + 1 for each M.
inline std::vector<LadderLevel> refinement_ladder(const Solution& sol, const std::vector<int>& Ms) {
  std::vector<ResidualReport> reports;
  for (int M : Ms) reports.push_back(pde_residual(sol, M + 1, M + 1));
  return ladder_from_reports(reports);
}

inline bool strictly_decreasing(const std::vector<LadderLevel>& ladder) {
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (!(ladder[i].max_residual < ladder[i - 1].max_residual)) return false;
  }
  return true;
}

struct KernelBoundsReport {
  bool pass = true;
  double min_value = std::numeric_limits<double>::infinity();
  double max_value = -std::numeric_limits<double>::infinity();
  int violations = 0;
  bool non_finite = false;
  // location of the value closest to leaving [0, 1]
  double worst_alpha = 0.0;
  double worst_mu = 0.0;
  double worst_t = 0.0;
  /// max(-v, v - 1) at that point; negative when every value is inside.
  double worst_excess = -std::numeric_limits<double>::infinity();
};

/// Scans C and S over t_i = i / (samples - 1) and checks 0 <= C, S <= 1
/// within 1e-9.
inline KernelBoundsReport kernel_bounds_check(const std::vector<double>& alphas, const std::vector<double>& mus,
                                              int samples, int threads = 1) {
  if (samples < 100) throw Error(ErrorKind::InvalidParams, "kernel bounds check needs at least 100 samples");
  constexpr double slack = 1e-9;
  struct Case {
    double alpha;
    double mu;
    KernelBoundsReport r;
  };
  std::vector<Case> cases;
  for (double a : alphas) {
    for (double m : mus) cases.push_back({a, m, {}});
  }
  parallel_for(cases.size(), threads, [&](std::size_t ci) {
    Case& cs = cases[ci];
    const Kernels k({cs.alpha, cs.mu});
    for (int i = 0; i < samples; ++i) {
      const double t = static_cast<double>(i) / (samples - 1);
      for (double v : {k.C(t), k.S(t)}) {
        if (!std::isfinite(v)) {
          cs.r.non_finite = true;
          cs.r.pass = false;
          continue;
        }
        cs.r.min_value = std::min(cs.r.min_value, v);
        cs.r.max_value = std::max(cs.r.max_value, v);
        const double excess = std::max(-v, v - 1.0);
        if (excess > slack) {
          ++cs.r.violations;
          cs.r.pass = false;
        }
        if (excess > cs.r.worst_excess) {
          cs.r.worst_excess = excess;
          cs.r.worst_alpha = cs.alpha;
          cs.r.worst_mu = cs.mu;
          cs.r.worst_t = t;
        }
      }
    }
  });
  KernelBoundsReport out;
  for (const Case& cs : cases) {
    out.pass = out.pass && cs.r.pass;
    out.non_finite = out.non_finite || cs.r.non_finite;
    out.violations += cs.r.violations;
    out.min_value = std::min(out.min_value, cs.r.min_value);
    out.max_value = std::max(out.max_value, cs.r.max_value);
    if (cs.r.worst_excess > out.worst_excess) {
      out.worst_excess = cs.r.worst_excess;
      out.worst_alpha = cs.r.worst_alpha;
      out.worst_mu = cs.r.worst_mu;
      out.worst_t = cs.r.worst_t;
    }
  }
  return out;
}

struct GramReport {
  std::size_t size = 0;
  double max_offdiag = 0.0;
  double max_diag_dev = 0.0;
  bool aliasing_risk = false;

  double max_deviation() const { return std::max(max_offdiag, max_diag_dev); }
};

/// Gram matrix of the first N modes of each parity family, integrated with
/// the composite rule `quad` (sized automatically when quad.panels == 0).
inline GramReport gram_check(ProblemKind kind, int N, const QuadSpec& quad = {}) {
  if (N < 1) throw Error(ErrorKind::InvalidParams, "gram_check needs N >= 1");
  std::vector<ModeIndex> modes;
  for (Parity p : {Parity::odd, Parity::even}) {
    for (int j = 0; j < N; ++j) modes.push_back({kind, p, k_min(kind, p) + j});
  }
  double omega_max = 0.0;
  for (const auto& m : modes) omega_max = std::max(omega_max, wavenumber(m));
  const CompositeRule rule = composite_rule(quad, 2.0 * omega_max);
  GramReport g;
  g.size = modes.size();
  g.aliasing_risk = aliasing_rule_violated(rule, 2.0 * omega_max);
  std::vector<std::vector<double>> samples(modes.size(), std::vector<double>(rule.size()));
  for (std::size_t a = 0; a < modes.size(); ++a) {
    const Eigenfunction Y(modes[a]);
    for (std::size_t i = 0; i < rule.size(); ++i) samples[a][i] = Y(rule.nodes[i]);
  }
  for (std::size_t a = 0; a < modes.size(); ++a) {
    for (std::size_t b = a; b < modes.size(); ++b) {
      CompensatedSum<double> s;
      for (std::size_t i = 0; i < rule.size(); ++i) s.add(rule.weights[i] * samples[a][i] * samples[b][i]);
      const double v = s.value();
      if (a == b) {
        g.max_diag_dev = std::max(g.max_diag_dev, std::abs(v - 1.0));
      } else {
        g.max_offdiag = std::max(g.max_offdiag, std::abs(v));
      }
    }
  }
  return g;
}

}  // namespace frhelm
