#pragma once

// End-to-end checks runnable from an installed binary: golden tables and
// fast-versus-enumeration equivalence on random games.

#include <cstdint>
#include <string>
#include <vector>

#include "mpg/oracle.hpp"

namespace mpg {

enum class SuiteStatus { Pass, Fail, Skip };

struct SuiteResult {
  std::string name;
  std::string module;
  SuiteStatus status = SuiteStatus::Pass;
  std::string detail;
};

struct SelftestOptions {
  EnumerationBudget budget;
  std::uint64_t seed = 1;
  int trials = 200;
  // Testing hook: perturbs the fast-path results of the named module.
  std::string injectFault;
};

/// Suites whose enumeration would exceed the budget are skipped.
std::vector<SuiteResult> run_selftest(const SelftestOptions& opts);

std::string format_results(const std::vector<SuiteResult>& results);

/// Golden data shared with the test suite: the n = 2 AER table (rows NN, NA,
/// AN, AA; columns NN .. SS) and the 5 x 8 alignment pair whose AER is 5/13.
extern const double kTable1Aer[4][9];
struct AlignmentPair {
  int sourceCount;
  int targetCount;
  LabelSequence gold;
  LabelSequence proposed;
};
AlignmentPair figure1_pair();

}  // namespace mpg
