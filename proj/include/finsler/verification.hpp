#pragma once

#include "finsler/report_io.hpp"

#include <functional>
#include <string>
#include <vector>

namespace finsler::verification {

/// One measured quantity of a criterion; `relation` is "<=", ">" or "flag"
/// (value 1 for true).
struct Measurement {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  std::string relation = "<=";
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Measurement> measurements;
  double seconds = 0.0;
  bool pass = false;
};

/// Total wall time allowed for the whole suite.
inline constexpr double kSuiteSeconds = 300.0;

/// Runs criteria 1..11 followed by the suite-runtime criterion 12. `progress`
/// is called after each criterion.
std::vector<CriterionResult> run_all(unsigned long long seed,
                                     const std::function<void(const CriterionResult&)>& progress = {});

/// Runs one of criteria 1..11.
CriterionResult run_criterion(int id, unsigned long long seed);

Json to_json(const CriterionResult& r);
/// {"pass": ..., "seconds": ..., "criteria": [...]}.
Json summary_json(const std::vector<CriterionResult>& results);

/// "[PASS] 03 title (1.23 s)" style line.
std::string summary_line(const CriterionResult& r);

}  // namespace finsler::verification
