#pragma once

#include "levynls/config.hpp"

#include <string>
#include <vector>

namespace levynls {

/// One machine-checkable property: passes when measured <= threshold.
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;

  double margin() const { return threshold - measured; }
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  /// Nonempty when the verification options themselves are unusable.
  std::string config_error;

  bool all_passed() const;
};

/// Runs the property suites of every module against the configured model.
VerifyReport run_verification(const RunConfig& config);

/// Reference modulus by enumerating every admissible partition; exponential
/// in the number of recorded times, intended for short paths only.
double enumerate_modulus(const std::vector<double>& times, const std::vector<double>& values,
                         double horizon, double delta);

}  // namespace levynls
