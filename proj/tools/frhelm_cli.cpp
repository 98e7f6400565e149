#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

constexpr const char* kSchemas = R"(Output files (numbers use 17 significant digits):
  solve     field.csv   '# key=value' lines, then x,y,u with y varying fastest
            solve.json  config echo, modes, coefficient diagnostics, warnings
  verify    verify.json config echo, boundary errors, residual reports, checks
            ladder.csv  level,h,max_residual,observed_order
  converge  converge.csv N,modes,x0_error,x1_error,side_error,max_boundary_error
  mlf       z,value,est_abs_error,regime
  basis     kind,parity,k,serial_index,family,wavenumber,lambda,mu,norm_const
  kernel    t,C,S
Exit codes: 0 ok, 2 invalid input, 3 numerical failure, 4 threshold violated.)";

}  // namespace

int main(int argc, char** argv) {
  using namespace frhelm::cli;
  CLI::App app{"Fractional Helmholtz boundary value problems with involution"};
  app.footer(kSchemas);
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  bool strict = false;
  bool corrupt = false;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--threads", threads, "worker threads, 0 = all cores (overrides threads)");
    sub->add_flag("--strict-compat", strict, "treat compatibility violations as errors");
  };

  auto* solve = app.add_subcommand("solve", "assemble the series solution and sample it on the grid");
  add_run_flags(solve);
  auto* verify = app.add_subcommand("verify", "boundary errors, PDE residual and refinement ladder");
  add_run_flags(verify);
  verify->add_flag("--corrupt", corrupt, "shift one mode coefficient before checking")->group("");
  auto* converge = app.add_subcommand("converge", "boundary error against truncation N");
  add_run_flags(converge);

  double alpha = 1.0;
  double beta = 1.0;
  std::string list;
  auto* mlf = app.add_subcommand("mlf", "tabulate E_{alpha,beta}(z)");
  mlf->add_option("alpha", alpha)->required();
  mlf->add_option("beta", beta)->required();
  mlf->add_option("z", list, "comma-separated arguments, constant expressions allowed")->required();
  mlf->add_option("--out", out_dir, "write mlf.csv into this directory instead of stdout");

  std::string kind = "D";
  double eps = 0.0;
  int n_max = 1;
  double c = 0.0;
  auto* basis = app.add_subcommand("basis", "tabulate eigenpairs of the y-problem");
  basis->add_option("kind", kind, "D, N, P or AP")->required();
  basis->add_option("eps", eps)->required();
  basis->add_option("N", n_max, "largest k per family")->required();
  basis->add_option("--c", c, "Helmholtz constant for the mu column");
  basis->add_option("--out", out_dir, "write basis.csv into this directory instead of stdout");

  double mu = 0.0;
  auto* kernel = app.add_subcommand("kernel", "tabulate the two-point kernels C and S");
  kernel->add_option("alpha", alpha)->required();
  kernel->add_option("mu", mu)->required();
  kernel->add_option("t", list, "comma-separated points in [0, 1]")->required();
  kernel->add_option("--out", out_dir, "write kernel.csv into this directory instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  }

  const RunOverrides ov{out_dir, threads, strict};
  return guarded(
      [&]() -> int {
        if (*solve) return cmd_solve(config, ov, std::cout);
        if (*verify) return cmd_verify(config, ov, corrupt, std::cout, std::cerr);
        if (*converge) return cmd_converge(config, ov, std::cout);
        if (*mlf) return cmd_mlf(alpha, beta, parse_number_list(list), out_dir, std::cout);
        if (*basis) return cmd_basis(frhelm::parse_kind(kind), eps, n_max, c, out_dir, std::cout);
        return cmd_kernel(alpha, mu, parse_number_list(list), out_dir, std::cout);
      },
      std::cerr);
}
