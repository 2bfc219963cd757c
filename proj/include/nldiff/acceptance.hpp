#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace nldiff {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;  ///< human-readable measured values
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Scratch space for the I/O criterion; a fresh directory under the system temp dir if empty.
  std::filesystem::path work_dir;
  /// When set, criterion 11 also runs `<cli_path> verify` and requires exit status 0.
  std::filesystem::path cli_path;
  /// Criteria to run (1..11); all when empty.
  std::vector<int> only;
  std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int kCriterionCount = 11;

/// Runs the acceptance criteria in order. Self-contained: builds its own grids and data.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// One line per criterion: "[PASS] 4  mass identity  (…)  0.61s".
std::string format_result_line(const CriterionResult& result);
std::string format_acceptance_table(const std::vector<CriterionResult>& results);

}  // namespace nldiff
