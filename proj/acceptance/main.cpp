#include <cstdio>
#include <string>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  hcl::acceptance::Config cfg;
  cfg.fixture_dir = HCL_FIXTURE_DIR;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--fixtures") cfg.fixture_dir = argv[++i];
  try {
    const auto results = hcl::acceptance::run_all(cfg, [](const hcl::acceptance::Criterion& c) {
      std::printf("%s\n", hcl::acceptance::format_line(c).c_str());
      std::fflush(stdout);
    });
    double total = 0.0;
    for (const auto& c : results) total += c.seconds;
    std::printf("total %.2f s\n", total);
    return hcl::acceptance::exit_code(results);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 3;
  }
}
