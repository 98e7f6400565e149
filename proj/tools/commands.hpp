#pragma once

// Subcommand bodies. Each returns a process exit code:
//   0 success, 2 invalid input, 3 numerical failure, 4 threshold violated.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "frhelm/error.hpp"
#include "frhelm/expression.hpp"
#include "frhelm/frac_kernels.hpp"
#include "frhelm/mittag_leffler.hpp"
#include "frhelm/solver.hpp"
#include "frhelm/spectral_basis.hpp"
#include "frhelm/verify.hpp"
#include "run_config.hpp"

namespace frhelm::cli {

enum ExitCode : int { exit_ok = 0, exit_invalid = 2, exit_numerical = 3, exit_threshold = 4 };

/// Flags shared by the config-driven subcommands; each overrides the config.
struct RunOverrides {
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  bool strict_compat = false;
};

/// Runs body, mapping exceptions to exit codes and a one-line diagnostic.
inline int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_validation() ? exit_invalid : exit_numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical;
  }
}

/// Comma-separated list of constant expressions, e.g. "0,pi/2,1e-3".
inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto node = expr::parse(item);
    if (expr::depends_on_y(node)) throw Error(ErrorKind::InvalidParams, "list entry '" + item + "' is not a constant");
    out.push_back(expr::eval(*node, 0.0));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string g17(double v) { return format_g17(v); }

namespace detail {

inline RunConfig load_with(const std::string& path, const RunOverrides& o) {
  RunConfig rc = load_config(path);
  if (o.out_dir) rc.out_dir = *o.out_dir;
  if (o.threads) {
    if (*o.threads < 0) throw Error(ErrorKind::InvalidParams, "--threads must be >= 0");
    rc.spec.threads = *o.threads;
  }
  if (o.strict_compat) rc.spec.compat = CompatibilityPolicy::hard;
  return rc;
}

inline std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create output directory '" + dir + "': " + ec.message());
  return std::filesystem::path(dir);
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoError, "cannot write '" + p.string() + "'");
  return os;
}

inline void write_json(const std::filesystem::path& p, const ordered_json& j) {
  auto os = open_out(p);
  os << j.dump(2) << "\n";
}

/// NaN and infinities become null.
inline ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

inline ordered_json mode_json(const ModeRecord& r) {
  const SerialIndex p = serial_index(r.mode);
  return ordered_json{{"parity", to_string(r.mode.parity)},
                      {"k", r.mode.k},
                      {"serial_index", p.n},
                      {"lambda", r.lambda},
                      {"mu", r.mu},
                      {"phi_coef", r.phi_coef},
                      {"psi_coef", r.psi_coef},
                      {"degenerate", r.degenerate}};
}

inline ordered_json table_json(const CoefficientTable& t) {
  return ordered_json{{"panels", t.panels},
                      {"order", t.order},
                      {"nodes", t.nodes},
                      {"quad_error", t.quad_error},
                      {"aliasing_risk", t.aliasing_risk},
                      {"norm_sq", t.norm_sq},
                      {"parseval_defect", t.parseval_defect}};
}

inline ordered_json compat_json(const CompatibilityReport& c) {
  ordered_json conds = ordered_json::array();
  for (const auto& k : c.conditions) conds.push_back({{"name", k.name}, {"mismatch", k.mismatch}, {"pass", k.pass}});
  return ordered_json{{"tol", c.tol}, {"pass", c.pass}, {"conditions", conds}};
}

inline ordered_json boundary_json(const BoundaryReport& b) {
  ordered_json side = ordered_json::array();
  for (const auto& s : b.side) side.push_back({{"name", s.name}, {"error", s.error}});
  return ordered_json{{"ny", b.ny},
                      {"x0_error", b.x0_error},
                      {"x1_error", b.x1_error},
                      {"side", side},
                      {"max_error", b.max_error()}};
}

inline ordered_json residual_json(const ResidualReport& r) {
  return ordered_json{{"nx", r.nx},
                      {"ny", r.ny},
                      {"hx", r.hx},
                      {"hy", r.hy},
                      {"max_abs", r.max_abs},
                      {"l2", r.l2},
                      {"terms",
                       {{"fractional", r.terms.fractional},
                        {"u_yy", r.terms.u_yy},
                        {"involution", r.terms.involution},
                        {"helmholtz", r.terms.helmholtz}}},
                      {"first_x_probe", r.first_x_probe},
                      {"excluded_x", r.excluded_x}};
}

inline ordered_json solution_json(const Solution& sol) {
  ordered_json modes = ordered_json::array();
  for (const auto& m : sol.modes()) modes.push_back(mode_json(m));
  return ordered_json{{"spec_hash", spec_hash(sol.spec())},
                      {"modes", modes},
                      {"phi_table", table_json(sol.phi_table())},
                      {"psi_table", table_json(sol.psi_table())},
                      {"compatibility", compat_json(sol.compatibility())},
                      {"warnings", sol.warnings()}};
}

/// Index of the mode with the largest data coefficients; the corruption hook
/// shifts this one so the damage is visible on the boundary.
inline std::size_t dominant_mode(const Solution& sol) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t i = 0; i < sol.modes().size(); ++i) {
    const double mag = std::abs(sol.modes()[i].phi_coef) + std::abs(sol.modes()[i].psi_coef);
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  return best;
}

}  // namespace detail

/// Writes field.csv and solve.json.
inline int cmd_solve(const std::string& config, const RunOverrides& o, std::ostream& out) {
  const RunConfig rc = detail::load_with(config, o);
  const Solution sol = assemble(rc.spec);
  const Field field = sol.evaluate_grid(rc.nx, rc.ny);
  const auto dir = detail::prepare_dir(rc.out_dir);
  {
    auto os = detail::open_out(dir / "field.csv");
    write_field_csv(field, os);
  }
  ordered_json report;
  report["command"] = "solve";
  report["config"] = echo(rc);
  report["solution"] = detail::solution_json(sol);
  report["field"] = {{"file", "field.csv"}, {"nx", rc.nx}, {"ny", rc.ny}};
  detail::write_json(dir / "solve.json", report);
  for (const auto& w : sol.warnings()) out << "warning: " << w << "\n";
  out << "solved " << to_string(rc.spec.kind) << " problem with " << sol.modes().size() << " modes, spec "
      << spec_hash(rc.spec) << "\n";
  return exit_ok;
}

/// Writes verify.json and ladder.csv. Exit 4 names every failing metric.
inline int cmd_verify(const std::string& config, const RunOverrides& o, bool corrupt, std::ostream& out,
                      std::ostream& err) {
  const RunConfig rc = detail::load_with(config, o);
  Solution sol = assemble(rc.spec);
  if (corrupt) sol = sol.perturbed(detail::dominant_mode(sol), 1e-3, 0.0);

  const BoundaryReport boundary = boundary_report(sol, rc.spec, rc.verify.boundary_ny);
  std::vector<ResidualReport> residuals;
  for (int M : rc.verify.ladder) residuals.push_back(pde_residual(sol, M + 1, M + 1));
  const auto ladder = ladder_from_reports(residuals);

  struct Check {
    std::string metric;
    double value;
    double threshold;
    bool pass;
  };
  std::vector<Check> checks;
  checks.push_back({"max_boundary_error", boundary.max_error(), rc.verify.max_boundary_error,
                    boundary.max_error() <= rc.verify.max_boundary_error});
  if (rc.verify.require_monotone_ladder) {
    double worst_increase = 0.0;
    for (std::size_t i = 1; i < ladder.size(); ++i) {
      worst_increase = std::max(worst_increase, ladder[i].max_residual - ladder[i - 1].max_residual);
    }
    checks.push_back({"residual_ladder_increase", worst_increase, 0.0, worst_increase <= 0.0});
  }
  if (rc.verify.max_residual) {
    const double finest = ladder.back().max_residual;
    checks.push_back({"max_residual", finest, *rc.verify.max_residual, finest <= *rc.verify.max_residual});
  }
  bool pass = true;
  for (const auto& c : checks) pass = pass && c.pass;

  const auto dir = detail::prepare_dir(rc.out_dir);
  {
    auto os = detail::open_out(dir / "ladder.csv");
    os << "level,h,max_residual,observed_order\n";
    for (const auto& lv : ladder) {
      os << lv.M << "," << g17(lv.h) << "," << g17(lv.max_residual) << ","
         << (std::isnan(lv.observed_order) ? std::string() : g17(lv.observed_order)) << "\n";
    }
  }
  ordered_json jl = ordered_json::array();
  for (const auto& lv : ladder) {
    jl.push_back({{"M", lv.M},
                  {"h", lv.h},
                  {"max_residual", lv.max_residual},
                  {"l2_residual", lv.l2_residual},
                  {"observed_order", detail::number(lv.observed_order)}});
  }
  ordered_json jr = ordered_json::array();
  for (const auto& r : residuals) jr.push_back(detail::residual_json(r));
  ordered_json jc = ordered_json::array();
  for (const auto& c : checks) {
    jc.push_back({{"metric", c.metric}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  }
  ordered_json report;
  report["command"] = "verify";
  report["config"] = echo(rc);
  report["corrupted"] = corrupt;
  report["solution"] = detail::solution_json(sol);
  report["boundary"] = detail::boundary_json(boundary);
  report["residual"] = jr;
  report["ladder"] = jl;
  report["ladder_monotone"] = strictly_decreasing(ladder);
  report["checks"] = jc;
  report["pass"] = pass;
  detail::write_json(dir / "verify.json", report);

  for (const auto& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.metric << " = " << g17(c.value) << " (threshold " << g17(c.threshold)
        << ")\n";
    if (!c.pass) err << "threshold violated: " << c.metric << " = " << g17(c.value) << " > " << g17(c.threshold) << "\n";
  }
  return pass ? exit_ok : exit_threshold;
}

/// Boundary-error decay over the configured truncation sweep; converge.csv.
inline int cmd_converge(const std::string& config, const RunOverrides& o, std::ostream& out) {
  const RunConfig rc = detail::load_with(config, o);
  const auto dir = detail::prepare_dir(rc.out_dir);
  auto os = detail::open_out(dir / "converge.csv");
  os << "N,modes,x0_error,x1_error,side_error,max_boundary_error\n";
  for (int n : rc.converge_N) {
    ProblemSpec s = rc.spec;
    s.N = n;
    const Solution sol = assemble(s);
    const BoundaryReport b = boundary_report(sol, s, rc.converge_ny);
    os << n << "," << sol.modes().size() << "," << g17(b.x0_error) << "," << g17(b.x1_error) << ","
       << g17(b.side_max()) << "," << g17(b.max_error()) << "\n";
    out << "N=" << n << " max_boundary_error=" << g17(b.max_error()) << "\n";
  }
  return exit_ok;
}

namespace detail {

/// Tabulation output goes to DIR/name when --out is given, else to `out`.
inline void emit(const std::optional<std::string>& dir, const std::string& name, const std::string& text,
                 std::ostream& out) {
  if (!dir) {
    out << text;
    return;
  }
  auto os = open_out(prepare_dir(*dir) / name);
  os << text;
}

}  // namespace detail

/// mlf.csv: z,value,est_abs_error,regime
inline int cmd_mlf(double alpha, double beta, const std::vector<double>& zs, const std::optional<std::string>& dir,
                   std::ostream& out) {
  std::string text = "z,value,est_abs_error,regime\n";
  for (double z : zs) {
    const MLResult r = ml_eval({alpha, beta}, z);
    text += g17(z) + "," + g17(r.value) + "," + g17(r.est_abs_error) + "," + to_string(r.regime) + "\n";
  }
  detail::emit(dir, "mlf.csv", text, out);
  return exit_ok;
}

/// basis.csv: kind,parity,k,serial_index,family,wavenumber,lambda,mu,norm_const
inline int cmd_basis(ProblemKind kind, double eps, int n_max, double c, const std::optional<std::string>& dir,
                     std::ostream& out) {
  require_eps(eps);
  if (n_max < 1) throw Error(ErrorKind::InvalidParams, "N must be >= 1");
  if (!std::isfinite(c)) throw Error(ErrorKind::InvalidParams, "c must be finite");
  std::string text = "kind,parity,k,serial_index,family,wavenumber,lambda,mu,norm_const\n";
  for (const ModeIndex& m : enumerate_modes(kind, n_max)) {
    const SerialIndex p = serial_index(m);
    text += std::string(to_string(kind)) + "," + to_string(m.parity) + "," + std::to_string(m.k) + "," +
            std::to_string(p.n) + "," + std::to_string(p.family) + "," + g17(wavenumber(m)) + "," +
            g17(eigenvalue(m, eps)) + "," + g17(mu_of_mode(m, eps, c)) + "," + g17(norm_const(m)) + "\n";
  }
  detail::emit(dir, "basis.csv", text, out);
  return exit_ok;
}

/// kernel.csv: t,C,S
inline int cmd_kernel(double alpha, double mu, const std::vector<double>& ts, const std::optional<std::string>& dir,
                      std::ostream& out) {
  const Kernels k({alpha, mu});
  std::string text = "t,C,S\n";
  for (double t : ts) text += g17(t) + "," + g17(k.C(t)) + "," + g17(k.S(t)) + "\n";
  detail::emit(dir, "kernel.csv", text, out);
  return exit_ok;
}

}  // namespace frhelm::cli
