#pragma once

// Double-oracle wall time with exact versus approximate best responses on
// synthetic F1 chain games.

#include <cstdint>
#include <string>
#include <vector>

namespace mpg {

struct BenchRow {
  int length = 0;
  double exactSeconds = 0.0;
  double approxSeconds = 0.0;
  double exactIterations = 0.0;
  double approxIterations = 0.0;
  double exactValue = 0.0;
  double approxValue = 0.0;
};

struct BenchOptions {
  std::vector<int> lengths{10, 20, 40, 80};
  int classes = 3;
  int games = 3;  // per length; times and iterations are averaged
  std::uint64_t seed = 1;
  double tol = 1e-6;
};

std::vector<BenchRow> run_bench(const BenchOptions& opts);

/// Whitespace-aligned table with a header row, readable by plotting tools.
std::string format_bench(const std::vector<BenchRow>& rows);

}  // namespace mpg
