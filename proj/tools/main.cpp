#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <optional>

#include "hcl/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hcl: elliptic cone convexity and Dirichlet problems"};
  hcl::cli::Command cmd;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol, tau;
  std::optional<int> density, stencil, max_iters;
  std::optional<hcl::SweepMode> mode;
  const std::map<std::string, hcl::SweepMode> modes{{"gauss-seidel", hcl::SweepMode::GaussSeidel},
                                                    {"jacobi", hcl::SweepMode::Jacobi}};

  app.add_option("verb", cmd.verb, "cone-check, cone-freedim, garding-test, field-classify, subaffine-check, "
                                   "hull-estimate, solve-dirichlet, solve-ma2d, domain-check, tube-check, selftest")
      ->required();
  app.add_option("--input", cmd.input, "problem document (fixture directory for selftest)");
  app.add_option("--out", cmd.out_dir, "output directory");
  app.add_option("--seed", seed, "64-bit seed");
  app.add_option("--tol", tol, "solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tau", tau, "membership band")->check(CLI::NonNegativeNumber);
  app.add_option("--density", density, "plane samples per family")->check(CLI::PositiveNumber);
  app.add_option("--stencil", stencil, "stencil width")->check(CLI::Range(1, 4));
  app.add_option("--max-iters", max_iters, "solver sweep limit")->check(CLI::PositiveNumber);
  app.add_option("--mode", mode, "jacobi or gauss-seidel")->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hcl::cli::kInputError;
  }
  cmd.overrides = {seed, tau, tol, density, stencil, max_iters, mode};
  return hcl::cli::run(cmd, std::cout, std::cerr);
}
