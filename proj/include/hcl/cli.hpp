#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "hcl/io.hpp"

namespace hcl::cli {

enum class Verb {
  ConeCheck,
  ConeFreedim,
  GardingTest,
  FieldClassify,
  SubaffineCheck,
  HullEstimate,
  SolveDirichlet,
  SolveMa2d,
  DomainCheck,
  TubeCheck,
  Selftest,
};

std::optional<Verb> parse_verb(std::string_view name);
std::string_view to_string(Verb v);

enum ExitCode : int { kOk = 0, kPropertyFailed = 2, kInputError = 3, kNumericalError = 4 };

struct Command {
  std::string verb;
  std::string input;    // document path; fixture directory for selftest
  std::string out_dir;  // empty: report to stdout only
  io::Overrides overrides;
};

/// Runs one command. Reports go to out_dir/report.json (plus grids for the
/// solvers and field verbs); diagnostics go to `err`, selftest lines to `out`.
int run(const Command& cmd, std::ostream& out, std::ostream& err);

}  // namespace hcl::cli
