#include "mpg/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "mpg/br_aer.hpp"
#include "mpg/br_bipartite.hpp"
#include "mpg/br_fscore.hpp"
#include "mpg/double_oracle.hpp"
#include "mpg/random_instances.hpp"

namespace mpg {

const double kTable1Aer[4][9] = {
    {0, 0, 1, 0, 0, 1, 1, 1, 1},
    {1, 0, 0, 1, 0, 0, 1, 1.0 / 2, 1.0 / 3},
    {1, 1, 1, 0, 0, 1.0 / 2, 0, 0, 1.0 / 3},
    {1, 1.0 / 2, 1.0 / 3, 1.0 / 2, 0, 0, 1.0 / 3, 0, 0},
};

AlignmentPair figure1_pair() {
  AlignmentPair p{5, 8, LabelSequence(40, adv::N), LabelSequence(40, pred::N)};
  auto at = [](int e, int f) { return static_cast<std::size_t>((e - 1) * 8 + (f - 1)); };
  for (auto [e, f] : {std::pair{1, 1}, {2, 2}, {3, 3}, {4, 5}, {5, 7}}) p.gold[at(e, f)] = adv::S;
  for (auto [e, f] : {std::pair{4, 4}, {5, 6}, {5, 8}}) p.gold[at(e, f)] = adv::P;
  for (auto [e, f] : {std::pair{1, 1}, {2, 2}, {3, 4}, {4, 4}, {4, 5}, {4, 7}, {5, 4}, {5, 8}})
    p.proposed[at(e, f)] = pred::A;
  return p;
}

namespace {

struct Suite {
  std::string name;
  std::string module;
  long payoffsNeeded;  // largest single enumeration the suite performs
  // Returns an empty string on success, else a description of the failure.
  std::function<std::string(Rng&, double fault)> run;
};

std::string mismatch(int trial, double fast, double reference) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "trial %d: fast %.17g vs enumeration %.17g", trial, fast, reference);
  return buf;
}

// Checks one best response: the claimed value matches enumeration and the
// returned sequence attains it.
std::string check_br(int trial, const BestResponse& fast, const BestResponse& ref, double recomputed) {
  if (std::abs(fast.value - ref.value) > 1e-9) return mismatch(trial, fast.value, ref.value);
  if (std::abs(recomputed - ref.value) > 1e-9) return mismatch(trial, recomputed, ref.value) + " (recomputed)";
  return "";
}

MixedStrategy f1_predictor_mix(Rng& rng, std::size_t n, Tag target) {
  const Tag filler = filler_class(target);
  return random_mix(rng, 4, [&] {
    LabelSequence s = random_sequence(rng, n, 2, 0, 0.15);
    for (std::size_t i = 0; i < n; ++i) s[i] = s[i] ? target : filler;
    return s;
  });
}

MixedStrategy chain_adversary_mix(Rng& rng, std::size_t n, int m, Tag target) {
  return random_mix(rng, 4, [&] { return random_sequence(rng, n, m, filler_class(target), 0.15); });
}

std::vector<Suite> suites(const SelftestOptions& opts) {
  const int trials = opts.trials;
  std::vector<Suite> out;

  out.push_back({"table-1", "oracle", 36, [](Rng&, double fault) -> std::string {
                   const FullGame g =
                       full_payoff_matrix(ScoreKind::aer(), AlignmentPotentials::zeros(2), 2, EnumerationBudget{36});
                   for (int r = 0; r < 4; ++r)
                     for (int c = 0; c < 9; ++c) {
                       const double aer = 1.0 - g.payoff(r, c) + fault;
                       if (std::abs(aer - kTable1Aer[r][c]) > 1e-12)
                         return "entry (" + std::to_string(r) + "," + std::to_string(c) + ") differs";
                     }
                   return "";
                 }});

  out.push_back({"figure-1", "core", 0, [](Rng&, double fault) -> std::string {
                   const AlignmentPair p = figure1_pair();
                   const double aer = aer_score(p.proposed, p.gold) + fault;
                   return std::abs(aer - 5.0 / 13.0) <= 1e-15 ? "" : mismatch(0, aer, 5.0 / 13.0);
                 }});

  out.push_back({"lcfm", "br-fscore", 729 * 4, [trials](Rng& rng, double fault) -> std::string {
                   for (int trial = 0; trial < trials; ++trial) {
                     const int n = 1 + rng.below(6), m = 2 + rng.below(2);
                     const Tag target = rng.below(m);
                     const ScoreKind kind = ScoreKind::f1(target, m);
                     const PotentialTable psi = random_chain_potentials(rng, n, m, 0.3);
                     const MixedStrategy pm = f1_predictor_mix(rng, static_cast<std::size_t>(n), target);
                     BestResponse fast = F1Oracle(target).adversary_br(pm, psi);
                     fast.value += fault;
                     const BestResponse ref = exhaustive_br(pm, kind, psi, Side::Adversary);
                     const std::string err =
                         check_br(trial, fast, ref, expected_payoff_vs_predictor(kind, psi, pm, fast.seq) + fault);
                     if (!err.empty()) return err;
                   }
                   return "";
                 }});

  out.push_back({"gfm", "br-fscore", 64 * 4, [trials](Rng& rng, double fault) -> std::string {
                   for (int trial = 0; trial < trials; ++trial) {
                     const int n = 1 + rng.below(6), m = 2 + rng.below(2);
                     const Tag target = rng.below(m);
                     const ScoreKind kind = ScoreKind::f1(target, m);
                     const PotentialTable psi = random_chain_potentials(rng, n, m, 0.3);
                     const MixedStrategy am = chain_adversary_mix(rng, static_cast<std::size_t>(n), m, target);
                     BestResponse fast = F1Oracle(target).predictor_br(am, psi);
                     fast.value += fault;
                     const BestResponse ref = exhaustive_br(am, kind, psi, Side::Predictor);
                     const std::string err =
                         check_br(trial, fast, ref, expected_payoff_vs_adversary(kind, psi, fast.seq, am) + fault);
                     if (!err.empty()) return err;
                   }
                   return "";
                 }});

  out.push_back({"aermax", "br-aer", 729 * 4, [trials](Rng& rng, double fault) -> std::string {
                   for (int trial = 0; trial < trials; ++trial) {
                     const int n = 1 + rng.below(6);
                     const ScoreKind kind = ScoreKind::aer();
                     const PotentialTable psi = random_alignment_potentials(rng, n, 0.3);
                     const MixedStrategy pm =
                         random_mix(rng, 4, [&] { return random_sequence(rng, static_cast<std::size_t>(n), 2, pred::N, 0.15); });
                     BestResponse fast = AerOracle().adversary_br(pm, psi);
                     fast.value += fault;
                     const BestResponse ref = exhaustive_br(pm, kind, psi, Side::Adversary);
                     const std::string err =
                         check_br(trial, fast, ref, expected_payoff_vs_predictor(kind, psi, pm, fast.seq) + fault);
                     if (!err.empty()) return err;
                   }
                   return "";
                 }});

  out.push_back({"aer-predictor", "br-aer", 64 * 4, [trials](Rng& rng, double fault) -> std::string {
                   for (int trial = 0; trial < trials; ++trial) {
                     const int n = 1 + rng.below(6);
                     const ScoreKind kind = ScoreKind::aer();
                     const PotentialTable psi = random_alignment_potentials(rng, n, 0.3);
                     const MixedStrategy am =
                         random_mix(rng, 4, [&] { return random_sequence(rng, static_cast<std::size_t>(n), 3, adv::N, 0.15); });
                     BestResponse fast = AerOracle().predictor_br(am, psi);
                     fast.value += fault;
                     const BestResponse ref = exhaustive_br(am, kind, psi, Side::Predictor);
                     const std::string err =
                         check_br(trial, fast, ref, expected_payoff_vs_adversary(kind, psi, fast.seq, am) + fault);
                     if (!err.empty()) return err;
                   }
                   return "";
                 }});

  out.push_back({"bipartite", "br-bipartite", 19683L * 4, [trials](Rng& rng, double fault) -> std::string {
                   for (int trial = 0; trial < trials; ++trial) {
                     const MatchingConstraint grid{1 + rng.below(3), 1 + rng.below(3)};
                     const auto n = static_cast<std::size_t>(grid.edges());
                     const ScoreKind kind = ScoreKind::bipartite(CostFunction{}, grid);
                     const PotentialTable psi = random_alignment_potentials(rng, static_cast<int>(n), 0.5);
                     const BipartiteOracle fastOracle(kind.cost, grid);
                     const MixedStrategy pm = random_mix(rng, 4, [&] { return random_matching(rng, grid, {pred::A}); });
                     const MixedStrategy am =
                         random_mix(rng, 4, [&] { return random_matching(rng, grid, {adv::P, adv::S}); });
                     BestResponse fa = fastOracle.adversary_br(pm, psi);
                     fa.value += fault;
                     std::string err = check_br(trial, fa, exhaustive_br(pm, kind, psi, Side::Adversary),
                                                expected_payoff_vs_predictor(kind, psi, pm, fa.seq) + fault);
                     if (!err.empty()) return "adversary " + err;
                     BestResponse fp = fastOracle.predictor_br(am, psi);
                     fp.value += fault;
                     err = check_br(trial, fp, exhaustive_br(am, kind, psi, Side::Predictor),
                                    expected_payoff_vs_adversary(kind, psi, fp.seq, am) + fault);
                     if (!err.empty()) return "predictor " + err;
                   }
                   return "";
                 }});

  out.push_back({"double-oracle", "double-oracle", 8 * 27, [trials](Rng& rng, double fault) -> std::string {
                   const double tol = 1e-7;
                   for (int trial = 0; trial < trials; ++trial) {
                     const int n = 1 + rng.below(3);
                     ScoreKind kind = ScoreKind::aer();
                     PotentialTable psi = random_alignment_potentials(rng, n, 0.3);
                     if (rng.below(2) == 0) {
                       const int m = 2 + rng.below(2);
                       kind = ScoreKind::f1(rng.below(m), m);
                       psi = random_chain_potentials(rng, n, m, 0.3);
                     }
                     const auto oracle = make_oracle(kind, BrMode::Exact);
                     OracleGameConfig cfg{kind, psi, tol, 500, 1e-10, {}, {}};
                     seed_without_gold(cfg, static_cast<std::size_t>(n),
                                       kind.kind == ScoreKindTag::F1 ? filler_class(kind.target) : pred::N, *oracle);
                     const GameSolution sol = run_double_oracle(cfg, *oracle);
                     const FullGame full = exhaustive_equilibrium(kind, psi, static_cast<std::size_t>(n));
                     if (!sol.certified) return "trial " + std::to_string(trial) + ": not certified";
                     if (sol.gap > 2 * tol) return "trial " + std::to_string(trial) + ": gap above 2 tol";
                     if (std::abs(sol.value + fault - full.equilibrium.value) > 1e-6)
                       return mismatch(trial, sol.value + fault, full.equilibrium.value);
                   }
                   return "";
                 }});

  out.push_back({"matrix-game", "matrix-game", 0, [trials](Rng& rng, double fault) -> std::string {
                   for (int trial = 0; trial < trials; ++trial) {
                     const int r = 1 + rng.below(8), c = 1 + rng.below(8);
                     Eigen::MatrixXd m(r, c);
                     for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 2.0 * rng.uniform() - 1.0;
                     const Equilibrium<double> eq = solve_zero_sum<double>(m);
                     const double rowGuarantee = (eq.rowMix.transpose() * m).minCoeff();
                     const double colGuarantee = (m * eq.colMix).maxCoeff();
                     if (colGuarantee - rowGuarantee + fault > 1e-9)
                       return "trial " + std::to_string(trial) + ": guarantees differ";
                   }
                   return "";
                 }});
  return out;
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelftestOptions& opts) {
  std::vector<SuiteResult> results;
  for (const Suite& s : suites(opts)) {
    SuiteResult r{s.name, s.module, SuiteStatus::Pass, ""};
    if (s.payoffsNeeded > opts.budget.maxPayoffs) {
      r.status = SuiteStatus::Skip;
      r.detail = "needs " + std::to_string(s.payoffsNeeded) + " payoffs, budget " + std::to_string(opts.budget.maxPayoffs);
    } else {
      Rng rng(opts.seed);
      const double fault = opts.injectFault == s.module ? 1e-3 : 0.0;
      try {
        r.detail = s.run(rng, fault);
        if (!r.detail.empty()) r.status = SuiteStatus::Fail;
      } catch (const std::exception& e) {
        r.status = SuiteStatus::Fail;
        r.detail = std::string("exception: ") + e.what();
      }
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_results(const std::vector<SuiteResult>& results) {
  std::ostringstream out;
  int pass = 0, fail = 0, skip = 0;
  for (const SuiteResult& r : results) {
    const char* tag = r.status == SuiteStatus::Pass ? "PASS" : r.status == SuiteStatus::Fail ? "FAIL" : "SKIP";
    (r.status == SuiteStatus::Pass ? pass : r.status == SuiteStatus::Fail ? fail : skip) += 1;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-4s %-14s [%s]", tag, r.name.c_str(), r.module.c_str());
    out << buf;
    if (!r.detail.empty()) out << "  " << r.detail;
    out << '\n';
  }
  out << "passed=" << pass << " failed=" << fail << " skipped=" << skip << '\n';
  return out.str();
}

}  // namespace mpg
