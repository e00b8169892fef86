#pragma once

// Property suites and the twelve acceptance checks. Each check compares the
// library against brute force, a closed form or an exact count, and reports
// a counterexample when it fails.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace secexp::verify {

struct Check {
  std::string property;
  long cases = 0;
  long violations = 0;
  double worst = 0;  // largest error or smallest margin, per property
  std::string detail;
  std::string counterexample;  // first failing case
  std::map<std::string, double> metrics;
  double seconds = 0;

  bool pass() const { return cases > 0 && violations == 0; }
};

struct SuiteInfo {
  std::string name;
  std::string description;
};

std::vector<SuiteInfo> list_suites();
// Throws ValidationError for an unknown suite.
std::vector<Check> run_suite(const std::string& name, std::uint64_t seed = 1);

constexpr int kCriteria = 12;
// Acceptance criterion 1..12.
Check criterion(int k, std::uint64_t seed = 1);

}  // namespace secexp::verify
