#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace noisyts {

struct CheckResult {
  std::string suite;
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 7;
  /// Perturb the closed-form R_t before comparison. The denoise suite must
  /// then fail; used to check that the checks can fail at all.
  bool mutate_rt = false;
};

/// Suites: "denoise", "lmc", "bounds", "all". Throws std::invalid_argument
/// for any other name.
std::vector<CheckResult> run_verify(const std::string& suite, const VerifyOptions& opts = {});

bool all_passed(const std::vector<CheckResult>& results);
void print_report(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace noisyts
