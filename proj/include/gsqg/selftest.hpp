#pragma once

#include <functional>
#include <string>
#include <vector>

namespace gsqg {

struct SelftestResult {
  std::string suite;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the built-in oracle suites of every module; on_result is called as
/// each suite finishes. Suites that throw are reported as failures.
std::vector<SelftestResult> run_selftest(const std::function<void(const SelftestResult&)>& on_result = {});

}  // namespace gsqg
