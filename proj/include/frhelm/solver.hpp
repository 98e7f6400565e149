#pragma once

// Series solution of
//     D^a_x D^a_x u + u_yy(x, y) - eps u_yy(x, -y) - c^2 u = 0  on (0,1) x (-pi,pi)
//     u(0, y) = phi(y),  u(1, y) = psi(y)
// with one of the D/N/P/AP conditions in y. Each eigenfunction Y of the
// y-problem contributes u_Y(x) Y(y) where u_Y solves the two-point problem
// with mu^2 = lambda + c^2 and data (phi, Y), (psi, Y).

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "frhelm/boundary_data.hpp"
#include "frhelm/error.hpp"
#include "frhelm/frac_kernels.hpp"
#include "frhelm/numeric.hpp"
#include "frhelm/parallel.hpp"
#include "frhelm/quadrature.hpp"
#include "frhelm/spectral_basis.hpp"

namespace frhelm {

enum class CompatibilityPolicy { hard, warn };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Dirichlet;
  double alpha = 1.0;
  double eps = 0.0;
  double c = 0.0;
  BoundaryFunction phi;
  BoundaryFunction psi;
  /// Modes per parity family: k_min <= k <= N.
  int N = 16;
  QuadSpec quad;
  double compat_tol = 1e-10;
  CompatibilityPolicy compat = CompatibilityPolicy::hard;
  /// Stated class C^{s} of the data; when set, slower coefficient decay
  /// produces warnings.
  std::optional<double> smoothness;
  int threads = 1;
};

inline void validate(const ProblemSpec& s) {
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "alpha must lie in (0, 1], got " + std::to_string(s.alpha));
  }
  require_eps(s.eps);
  if (!std::isfinite(s.c)) throw Error(ErrorKind::InvalidParams, "c must be finite");
  if (s.N < 1) throw Error(ErrorKind::InvalidParams, "truncation N must be >= 1");
  if (s.quad.order < 1 || s.quad.panels < 0) throw Error(ErrorKind::InvalidParams, "invalid quadrature settings");
  if (!(s.compat_tol >= 0.0)) throw Error(ErrorKind::InvalidParams, "compatibility tolerance must be >= 0");
  if (s.smoothness && !(*s.smoothness > 0.0)) throw Error(ErrorKind::InvalidParams, "smoothness must be positive");
}

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Canonical one-line description; two specs with the same description
/// produce identical solutions.
inline std::string describe(const ProblemSpec& s) {
  std::ostringstream os;
  os << "kind=" << to_string(s.kind) << ";alpha=" << format_g17(s.alpha) << ";eps=" << format_g17(s.eps)
     << ";c=" << format_g17(s.c) << ";phi=" << to_string(s.phi.source()) << ":" << s.phi.text()
     << ";psi=" << to_string(s.psi.source()) << ":" << s.psi.text() << ";N=" << s.N << ";panels=" << s.quad.panels
     << ";order=" << s.quad.order;
  return os.str();
}

/// 64-bit FNV-1a, hex.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

inline std::string spec_hash(const ProblemSpec& s) { return fnv1a_hex(describe(s)); }

struct ModeRecord {
  ModeIndex mode;
  double lambda = 0.0;
  double mu = 0.0;
  double phi_coef = 0.0;
  double psi_coef = 0.0;
  /// mu == 0: profile is (1 - x^a) phi + x^a psi.
  bool degenerate = false;
};

/// Samples of a scalar field on a tensor grid, y varying fastest.
struct Field {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> values;
  std::map<std::string, std::string> metadata;

  std::size_t nx() const { return x.size(); }
  std::size_t ny() const { return y.size(); }
  double at(std::size_t ix, std::size_t iy) const { return values[ix * y.size() + iy]; }
  double& at(std::size_t ix, std::size_t iy) { return values[ix * y.size() + iy]; }
};

/// x_j = j / (nx - 1).
inline std::vector<double> uniform_x(int nx) {
  if (nx < 2) throw Error(ErrorKind::InvalidParams, "need at least 2 x nodes");
  std::vector<double> x(nx);
  for (int j = 0; j < nx; ++j) x[j] = static_cast<double>(j) / (nx - 1);
  x.back() = 1.0;
  return x;
}

/// y_i = pi (2i - (ny - 1)) / (ny - 1); exactly antisymmetric, y_i = -y_{ny-1-i}.
inline std::vector<double> symmetric_y(int ny) {
  if (ny < 2) throw Error(ErrorKind::InvalidParams, "need at least 2 y nodes");
  std::vector<double> y(ny);
  for (int i = 0; i < ny; ++i) y[i] = pi * static_cast<double>(2 * i - (ny - 1)) / (ny - 1);
  y.front() = -pi;
  y.back() = pi;
  return y;
}

class Solution {
 public:
  Solution(ProblemSpec spec, std::vector<ModeRecord> modes, CoefficientTable phi_table, CoefficientTable psi_table,
           CompatibilityReport compat, std::vector<std::string> warnings)
      : spec_(std::move(spec)),
        modes_(std::move(modes)),
        phi_table_(std::move(phi_table)),
        psi_table_(std::move(psi_table)),
        compat_(std::move(compat)),
        warnings_(std::move(warnings)) {
    kernels_.reserve(modes_.size());
    for (const auto& m : modes_) kernels_.emplace_back(KernelParams{spec_.alpha, m.degenerate ? 0.0 : m.mu});
  }

  const ProblemSpec& spec() const { return spec_; }
  const std::vector<ModeRecord>& modes() const { return modes_; }
  const CoefficientTable& phi_table() const { return phi_table_; }
  const CoefficientTable& psi_table() const { return psi_table_; }
  const CompatibilityReport& compatibility() const { return compat_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool has_degenerate_mode() const {
    for (const auto& m : modes_) {
      if (m.degenerate) return true;
    }
    return false;
  }

  std::size_t index_of(const ModeIndex& mode) const {
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      if (modes_[i].mode == mode) return i;
    }
    throw Error(ErrorKind::UnknownMode, to_string(mode) + " is not part of this solution");
  }

  /// u_mode(x) for the i-th stored mode.
  double profile(std::size_t i, double x) const {
    const ModeRecord& m = modes_[i];
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::DomainError, "x must lie in [0, 1]");
    double v = 0.0;
    if (m.phi_coef != 0.0) v += m.phi_coef * kernels_[i].C(x);
    if (m.psi_coef != 0.0) v += m.psi_coef * kernels_[i].S(x);
    return v;
  }

  double evaluate(double x, double y) const { return evaluate_dy(x, y, 0); }

  /// d^order u / dy^order at (x, y), termwise.
  double evaluate_dy(double x, double y, int order) const {
    check_point(x, y);
    CompensatedSum<double> s;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      if (!active(i)) continue;
      s.add(profile(i, x) * Eigenfunction(modes_[i].mode).derivative(y, order));
    }
    return s.value();
  }

  Field evaluate_grid(int nx, int ny) const { return evaluate_on(uniform_x(nx), symmetric_y(ny)); }

  /// Tensor-grid evaluation; parallel over x rows, each row summed over
  /// modes in storage order.
  Field evaluate_on(const std::vector<double>& xs, const std::vector<double>& ys, int y_order = 0) const {
    for (double x : xs) check_point(x, 0.0);
    for (double y : ys) check_point(0.0, y);
    Field f;
    f.x = xs;
    f.y = ys;
    f.values.assign(xs.size() * ys.size(), 0.0);
    f.metadata["spec_hash"] = spec_hash(spec_);
    f.metadata["N"] = std::to_string(spec_.N);
    f.metadata["kind"] = to_string(spec_.kind);
    std::vector<std::size_t> act;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      if (active(i)) act.push_back(i);
    }
    std::vector<double> basis(act.size() * ys.size());
    for (std::size_t a = 0; a < act.size(); ++a) {
      const Eigenfunction Y(modes_[act[a]].mode);
      for (std::size_t iy = 0; iy < ys.size(); ++iy) basis[a * ys.size() + iy] = Y.derivative(ys[iy], y_order);
    }
    parallel_for(xs.size(), spec_.threads, [&](std::size_t ix) {
      std::vector<double> prof(act.size());
      for (std::size_t a = 0; a < act.size(); ++a) prof[a] = profile(act[a], xs[ix]);
      for (std::size_t iy = 0; iy < ys.size(); ++iy) {
        CompensatedSum<double> s;
        for (std::size_t a = 0; a < act.size(); ++a) s.add(prof[a] * basis[a * ys.size() + iy]);
        f.values[ix * ys.size() + iy] = s.value();
      }
    });
    return f;
  }

  /// Copy with one mode's coefficients shifted. Used as a negative control
  /// by the verification tooling.
  Solution perturbed(std::size_t i, double dphi, double dpsi) const {
    Solution s = *this;
    s.modes_.at(i).phi_coef += dphi;
    s.modes_.at(i).psi_coef += dpsi;
    return s;
  }

 private:
  bool active(std::size_t i) const { return modes_[i].phi_coef != 0.0 || modes_[i].psi_coef != 0.0; }

  static void check_point(double x, double y) {
    if (!(x >= 0.0 && x <= 1.0) || !(std::abs(y) <= pi * (1.0 + 1e-12))) {
      throw Error(ErrorKind::DomainError, "point (" + std::to_string(x) + ", " + std::to_string(y) +
                                              ") lies outside [0,1] x [-pi,pi]");
    }
  }

  ProblemSpec spec_;
  std::vector<ModeRecord> modes_;
  std::vector<Kernels> kernels_;
  CoefficientTable phi_table_;
  CoefficientTable psi_table_;
  CompatibilityReport compat_;
  std::vector<std::string> warnings_;
};

/// Builds the truncated series. Throws CompatibilityFailure when the
/// endpoint conditions fail under the hard policy.
inline Solution assemble(const ProblemSpec& spec) {
  validate(spec);
  std::vector<std::string> warnings;
  CompatibilityReport compat = compatibility_check(spec.phi, spec.psi, spec.kind, spec.compat_tol);
  if (!compat.pass) {
    if (spec.compat == CompatibilityPolicy::hard) throw Error(ErrorKind::CompatibilityFailure, compat.summary());
    warnings.push_back("compatibility: " + compat.summary());
  }
  for (const auto& w : compat.warnings) warnings.push_back(w);

  CoefficientTable phi_t = expand(spec.phi, spec.kind, spec.N, spec.quad);
  CoefficientTable psi_t = expand(spec.psi, spec.kind, spec.N, spec.quad);
  if (phi_t.aliasing_risk || psi_t.aliasing_risk) {
    warnings.push_back("quadrature has fewer than 4 nodes per unit wavenumber; coefficients may alias");
  }
  if (spec.smoothness) {
    for (const auto* t : {&phi_t, &psi_t}) {
      const std::string name = t == &phi_t ? "phi: " : "psi: ";
      try {
        for (const auto& w : smoothness_warnings(decay_estimate(*t), *spec.smoothness)) warnings.push_back(name + w);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InsufficientData) throw;
      }
    }
  }

  std::vector<ModeRecord> modes(phi_t.modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    ModeRecord& r = modes[i];
    r.mode = phi_t.modes[i];
    r.lambda = eigenvalue(r.mode, spec.eps);
    r.mu = mu_of_mode(r.mode, spec.eps, spec.c);
    r.phi_coef = phi_t.values[i];
    r.psi_coef = psi_t.values[i];
    r.degenerate = (r.mu == 0.0);
  }
  return Solution(spec, std::move(modes), std::move(phi_t), std::move(psi_t), std::move(compat), std::move(warnings));
}

/// Samples of u_mode on xs.
inline std::vector<double> modal_profile(const Solution& sol, const ModeIndex& mode, const std::vector<double>& xs) {
  const std::size_t i = sol.index_of(mode);
  std::vector<double> out(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) out[j] = sol.profile(i, xs[j]);
  return out;
}

/// CSV: '# key=value' metadata lines, header `x,y,u`, then one row per
/// node with y varying fastest. Numbers use 17 significant digits.
inline void write_field_csv(const Field& f, std::ostream& os) {
  for (const auto& [k, v] : f.metadata) os << "# " << k << "=" << v << "\n";
  os << "x,y,u\n";
  char buf[128];
  for (std::size_t ix = 0; ix < f.nx(); ++ix) {
    for (std::size_t iy = 0; iy < f.ny(); ++iy) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.x[ix], f.y[iy], f.at(ix, iy));
      os << buf;
    }
  }
}

inline Field read_field_csv(std::istream& is) {
  Field f;
  std::string line;
  bool header = false;
  std::vector<double> xs;
  std::vector<double> ys;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) f.metadata[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (!header) {
      if (line != "x,y,u") throw Error(ErrorKind::IoError, "field CSV must start with header 'x,y,u'");
      header = true;
      continue;
    }
    double x = 0.0;
    double y = 0.0;
    double u = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &u) != 3) {
      throw Error(ErrorKind::IoError, "malformed field CSV row '" + line + "'");
    }
    if (xs.empty() || xs.back() != x) xs.push_back(x);
    if (xs.size() == 1) ys.push_back(y);
    f.values.push_back(u);
  }
  if (!header) throw Error(ErrorKind::IoError, "field CSV has no header");
  if (xs.size() * ys.size() != f.values.size()) throw Error(ErrorKind::IoError, "field CSV is not a tensor grid");
  f.x = std::move(xs);
  f.y = std::move(ys);
  return f;
}

}  // namespace frhelm
