#pragma once

#include <functional>
#include <string>
#include <vector>

namespace lcorr {

enum class VerifyLevel { Quick, Full };

/// One audited statement. `measured` is the worst value seen and `bound` the
/// value it is compared against; `slack` is bound - measured for "at most"
/// checks and measured - bound for "at least" checks.
struct CheckResult {
  std::string module;
  std::string name;
  std::string claim;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = false;
};

struct VerifyReport {
  VerifyLevel level = VerifyLevel::Quick;
  int grid = 65;
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::string text() const;
};

/// Runs every module invariant on 65x65 (quick) or 257x257 (full) grids. The
/// full level adds the O(1/N) decay sweep and a six stage run.
VerifyReport verify(VerifyLevel level,
                    const std::function<void(const CheckResult&)>& progress = {});

}  // namespace lcorr
