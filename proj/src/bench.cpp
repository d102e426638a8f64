#include "mpg/bench.hpp"

#include <chrono>
#include <cstdio>

#include "mpg/br_fscore.hpp"
#include "mpg/double_oracle.hpp"
#include "mpg/random_instances.hpp"

namespace mpg {

namespace {

struct Timed {
  double seconds;
  int iterations;
  double value;
};

Timed solve(const ScoreKind& kind, const ChainPotentials& psi, BrMode mode, double tol) {
  const auto start = std::chrono::steady_clock::now();
  const auto oracle = make_oracle(kind, mode);
  OracleGameConfig cfg{kind, psi, tol, 500, 1e-9, {}, {}};
  seed_without_gold(cfg, static_cast<std::size_t>(psi.length()), filler_class(kind.target), *oracle);
  const GameSolution sol = run_double_oracle(cfg, *oracle);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return {elapsed.count(), sol.iterations, sol.value};
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& opts) {
  if (opts.classes < 2 || opts.games < 1) throw InvalidInput("bench: need at least two classes and one game");
  std::vector<BenchRow> rows;
  Rng rng(opts.seed);
  for (int n : opts.lengths) {
    if (n < 1) throw InvalidInput("bench: lengths must be positive");
    BenchRow row;
    row.length = n;
    for (int g = 0; g < opts.games; ++g) {
      const ScoreKind kind = ScoreKind::f1(0, opts.classes);
      // Per-position scale keeps the total potential comparable to the score.
      const ChainPotentials psi = random_chain_potentials(rng, n, opts.classes, 1.0 / n);
      const Timed exact = solve(kind, psi, BrMode::Exact, opts.tol);
      const Timed approx = solve(kind, psi, BrMode::Approximate, opts.tol);
      row.exactSeconds += exact.seconds / opts.games;
      row.approxSeconds += approx.seconds / opts.games;
      row.exactIterations += static_cast<double>(exact.iterations) / opts.games;
      row.approxIterations += static_cast<double>(approx.iterations) / opts.games;
      row.exactValue += exact.value / opts.games;
      row.approxValue += approx.value / opts.games;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_bench(const std::vector<BenchRow>& rows) {
  std::string out = "length exact_s approx_s exact_iter approx_iter exact_value approx_value\n";
  char buf[200];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.1f %.1f %.9f %.9f\n", r.length, r.exactSeconds, r.approxSeconds,
                  r.exactIterations, r.approxIterations, r.exactValue, r.approxValue);
    out += buf;
  }
  return out;
}

}  // namespace mpg
