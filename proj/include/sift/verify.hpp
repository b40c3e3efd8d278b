#pragma once

// Headless self-check suites behind `sift_rls verify`. Each suite draws its
// own random instances from the given seed and reports pass/fail with a few
// human-readable detail lines.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sift::verify {

struct Options {
  std::uint64_t seed = 1;
  /// Test hook: corrupt the monitored state so the monitor suite must fail.
  bool inject_fault = false;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::vector<std::string> details;
};

/// decomposition, degeneration, path-equivalence, monitor, stability,
/// counterexample
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite name.
SuiteResult run_suite(std::string_view name, const Options& options);

}  // namespace sift::verify
