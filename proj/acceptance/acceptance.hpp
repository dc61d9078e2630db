#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hcl/io.hpp"

namespace hcl::acceptance {

enum class Status { Pass, Fail, InputError, NumericalError };

struct Criterion {
  int id = 0;
  std::string title;
  Status status = Status::Fail;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // seconds
};

/// Parsed fixture documents. Loading validates every file and its schema version.
/// Fixture documents, loaded on first use. A missing or malformed file is an
/// InputError for the criteria that read it.
class Fixtures {
 public:
  explicit Fixtures(std::string dir) : dir_(std::move(dir)) {}
  const io::Json& operator()(const std::string& name) const;

 private:
  std::string dir_;
  mutable std::map<std::string, io::Json> docs_;
};

struct Config {
  std::string fixture_dir;
  io::Overrides overrides;
};

Criterion run_criterion(int id, const Fixtures& fx, const io::Overrides& o);

/// Criteria 1..11 in order; `on_done` sees each as it finishes.
std::vector<Criterion> run_all(const Config& cfg, const std::function<void(const Criterion&)>& on_done = {});

std::string format_line(const Criterion& c);

/// 0 all pass, 3 any input error, 4 any numerical failure, else 2.
int exit_code(const std::vector<Criterion>& results);

io::Json to_json(const std::vector<Criterion>& results);

}  // namespace hcl::acceptance
