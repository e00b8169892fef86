// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "secexp/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

using namespace secexp;

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  std::uint64_t seed = 1;
  bool verbose = false;
  app.add_option("--only", only, "run a single criterion")->check(CLI::Range(1, verify::kCriteria));
  app.add_option("--seed", seed, "seed for the randomized criteria");
  app.add_flag("-v,--verbose", verbose, "print metrics");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (int k = 1; k <= verify::kCriteria; ++k) {
    if (only && k != only) continue;
    verify::Check c;
    try {
      c = verify::criterion(k, seed);
    } catch (const std::exception& e) {
      c.property = "criterion " + std::to_string(k);
      c.counterexample = std::string("exception: ") + e.what();
      c.violations = 1;
    }
    const bool ok = c.pass();
    failed += !ok;
    std::printf("criterion %2d %s  %s | %s | %.1f s\n", k, ok ? "PASS" : "FAIL", c.property.c_str(),
                c.detail.c_str(), c.seconds);
    if (!ok) std::printf("    first failure: %s\n", c.counterexample.c_str());
    if (verbose)
      for (const auto& [name, v] : c.metrics) std::printf("    %s = %.9g\n", name.c_str(), v);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
