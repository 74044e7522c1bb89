#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sij/gamma.hpp"

namespace sij {

enum class AcceptanceLevel { Quick, Full };

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;   // failure detail or summary counts
  double millis = 0.0;
};

struct AcceptanceOptions {
  AcceptanceLevel level = AcceptanceLevel::Full;
  unsigned jobs = 0;  // 0 = hardware concurrency
};

// Runs every acceptance criterion and reports one result per criterion, in
// order. Criteria are independent; failures do not stop the run.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

// One pass/fail line per criterion, plus a trailing summary line.
std::string format_acceptance(const std::vector<CriterionResult>& results);

}  // namespace sij
