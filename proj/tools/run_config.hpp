#pragma once

// JSON run configuration for the command-line tool. Unknown keys are
// rejected at every level.

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "frhelm/boundary_data.hpp"
#include "frhelm/error.hpp"
#include "frhelm/solver.hpp"

namespace frhelm::cli {

using nlohmann::json;
using nlohmann::ordered_json;

/// How a boundary function was given, kept for the config echo.
struct FunctionSource {
  std::string type = "expr";  // expr | catalog | csv
  std::string value = "0";
};

struct VerifySettings {
  std::vector<int> ladder{32, 64, 128, 256};
  int boundary_ny = 257;
  double max_boundary_error = 1e-10;
  std::optional<double> max_residual;
  bool require_monotone_ladder = true;
};

struct RunConfig {
  ProblemSpec spec;
  FunctionSource phi;
  FunctionSource psi;
  int nx = 21;
  int ny = 21;
  VerifySettings verify;
  std::vector<int> converge_N{4, 8, 16, 32, 64};
  int converge_ny = 257;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  /// directory of the config file; relative csv paths resolve against it
  std::filesystem::path base_dir;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& where, const std::string& msg) {
  throw Error(ErrorKind::ConfigError, where + ": " + msg);
}

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) config_error(where, "unknown key '" + key + "'");
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(where + "." + key, "wrong type");
  }
}

inline FunctionSource parse_function(const json& j, const std::string& where) {
  FunctionSource f;
  if (j.is_string()) {
    f.value = j.get<std::string>();
    return f;
  }
  if (j.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << j.get<double>();
    f.value = os.str();
    return f;
  }
  reject_unknown(j, where, {"expr", "catalog", "csv"});
  if (j.size() != 1) config_error(where, "give exactly one of expr, catalog, csv");
  const auto& [key, value] = *j.items().begin();
  if (!value.is_string()) config_error(where + "." + key, "expected a string");
  f.type = key;
  f.value = value.get<std::string>();
  return f;
}

inline BoundaryFunction build_function(const FunctionSource& f, const std::filesystem::path& base) {
  if (f.type == "expr") return BoundaryFunction::from_expression(f.value);
  if (f.type == "catalog") return BoundaryFunction::catalog(f.value);
  std::filesystem::path p(f.value);
  if (p.is_relative()) p = base / p;
  return BoundaryFunction::from_csv(p.string());
}

inline ordered_json function_json(const FunctionSource& f) {
  if (f.type == "expr") return f.value;
  ordered_json j;
  j[f.type] = f.value;
  return j;
}

}  // namespace detail

inline RunConfig parse_config(const json& root, const std::filesystem::path& base_dir = {}) {
  using detail::get;
  RunConfig rc;
  rc.base_dir = base_dir;
  detail::reject_unknown(root, "config", {"problem", "grid", "verify", "converge", "output", "threads", "seed"});
  if (!root.contains("problem")) detail::config_error("config", "missing 'problem' section");
  const json& p = root.at("problem");
  detail::reject_unknown(p, "problem",
                         {"kind", "alpha", "eps", "c", "phi", "psi", "N", "quadrature", "compatibility", "smoothness"});
  rc.spec.kind = parse_kind(get<std::string>(p, "kind", "problem", "D"));
  rc.spec.alpha = get<double>(p, "alpha", "problem", 1.0);
  rc.spec.eps = get<double>(p, "eps", "problem", 0.0);
  rc.spec.c = get<double>(p, "c", "problem", 0.0);
  rc.spec.N = get<int>(p, "N", "problem", 16);
  if (p.contains("smoothness") && !p.at("smoothness").is_null()) {
    rc.spec.smoothness = get<double>(p, "smoothness", "problem", 0.0);
  }
  if (p.contains("phi")) rc.phi = detail::parse_function(p.at("phi"), "problem.phi");
  if (p.contains("psi")) rc.psi = detail::parse_function(p.at("psi"), "problem.psi");
  if (p.contains("quadrature")) {
    const json& q = p.at("quadrature");
    detail::reject_unknown(q, "problem.quadrature", {"panels", "order"});
    rc.spec.quad.panels = get<int>(q, "panels", "problem.quadrature", 0);
    rc.spec.quad.order = get<int>(q, "order", "problem.quadrature", 16);
  }
  if (p.contains("compatibility")) {
    const json& c = p.at("compatibility");
    detail::reject_unknown(c, "problem.compatibility", {"policy", "tol"});
    const auto policy = get<std::string>(c, "policy", "problem.compatibility", "hard");
    if (policy == "hard") {
      rc.spec.compat = CompatibilityPolicy::hard;
    } else if (policy == "warn") {
      rc.spec.compat = CompatibilityPolicy::warn;
    } else {
      detail::config_error("problem.compatibility.policy", "expected 'hard' or 'warn'");
    }
    rc.spec.compat_tol = get<double>(c, "tol", "problem.compatibility", 1e-10);
  }
  if (root.contains("grid")) {
    const json& g = root.at("grid");
    detail::reject_unknown(g, "grid", {"nx", "ny"});
    rc.nx = get<int>(g, "nx", "grid", rc.nx);
    rc.ny = get<int>(g, "ny", "grid", rc.ny);
  }
  if (root.contains("verify")) {
    const json& v = root.at("verify");
    detail::reject_unknown(v, "verify",
                           {"ladder", "boundary_ny", "max_boundary_error", "max_residual", "require_monotone_ladder"});
    rc.verify.ladder = get<std::vector<int>>(v, "ladder", "verify", rc.verify.ladder);
    rc.verify.boundary_ny = get<int>(v, "boundary_ny", "verify", rc.verify.boundary_ny);
    rc.verify.max_boundary_error = get<double>(v, "max_boundary_error", "verify", rc.verify.max_boundary_error);
    if (v.contains("max_residual") && !v.at("max_residual").is_null()) {
      rc.verify.max_residual = get<double>(v, "max_residual", "verify", 0.0);
    }
    rc.verify.require_monotone_ladder =
        get<bool>(v, "require_monotone_ladder", "verify", rc.verify.require_monotone_ladder);
  }
  if (root.contains("converge")) {
    const json& c = root.at("converge");
    detail::reject_unknown(c, "converge", {"N", "ny"});
    rc.converge_N = get<std::vector<int>>(c, "N", "converge", rc.converge_N);
    rc.converge_ny = get<int>(c, "ny", "converge", rc.converge_ny);
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    detail::reject_unknown(o, "output", {"dir"});
    rc.out_dir = get<std::string>(o, "dir", "output", rc.out_dir);
  }
  rc.spec.threads = get<int>(root, "threads", "config", 1);
  rc.seed = get<std::uint64_t>(root, "seed", "config", 0);

  if (rc.nx < 2 || rc.ny < 2) detail::config_error("grid", "nx and ny must be >= 2");
  if (rc.verify.ladder.empty()) detail::config_error("verify.ladder", "must not be empty");
  for (int M : rc.verify.ladder) {
    if (M < 32 || M % 2) detail::config_error("verify.ladder", "levels must be even and >= 32");
  }
  if (rc.verify.boundary_ny < 16) detail::config_error("verify.boundary_ny", "must be >= 16");
  for (int n : rc.converge_N) {
    if (n < 1) detail::config_error("converge.N", "entries must be >= 1");
  }
  rc.spec.phi = detail::build_function(rc.phi, rc.base_dir);
  rc.spec.psi = detail::build_function(rc.psi, rc.base_dir);
  validate(rc.spec);
  return rc;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, path + ": " + e.what());
  }
  return parse_config(root, std::filesystem::path(path).parent_path());
}

/// Config echo. Thread count and output directory are execution settings
/// and stay out, so reports do not depend on them.
inline ordered_json echo(const RunConfig& rc) {
  ordered_json p;
  p["kind"] = to_string(rc.spec.kind);
  p["alpha"] = rc.spec.alpha;
  p["eps"] = rc.spec.eps;
  p["c"] = rc.spec.c;
  p["phi"] = detail::function_json(rc.phi);
  p["psi"] = detail::function_json(rc.psi);
  p["N"] = rc.spec.N;
  p["quadrature"] = {{"panels", rc.spec.quad.panels}, {"order", rc.spec.quad.order}};
  p["compatibility"] = {{"policy", rc.spec.compat == CompatibilityPolicy::hard ? "hard" : "warn"},
                        {"tol", rc.spec.compat_tol}};
  p["smoothness"] = rc.spec.smoothness ? ordered_json(*rc.spec.smoothness) : ordered_json(nullptr);
  ordered_json j;
  j["problem"] = p;
  j["grid"] = {{"nx", rc.nx}, {"ny", rc.ny}};
  ordered_json v;
  v["ladder"] = rc.verify.ladder;
  v["boundary_ny"] = rc.verify.boundary_ny;
  v["max_boundary_error"] = rc.verify.max_boundary_error;
  v["max_residual"] = rc.verify.max_residual ? ordered_json(*rc.verify.max_residual) : ordered_json(nullptr);
  v["require_monotone_ladder"] = rc.verify.require_monotone_ladder;
  j["verify"] = v;
  j["converge"] = {{"N", rc.converge_N}, {"ny", rc.converge_ny}};
  j["seed"] = rc.seed;
  return j;
}

}  // namespace frhelm::cli
