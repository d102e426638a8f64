#include "mpg/double_oracle.hpp"

#include <algorithm>

#include "mpg/br_aer.hpp"
#include "mpg/br_bipartite.hpp"
#include "mpg/br_fscore.hpp"
#include "mpg/matrix_game.hpp"

namespace mpg {

namespace {

std::vector<LabelSequence> deduplicated(const std::vector<LabelSequence>& in) {
  std::vector<LabelSequence> out;
  for (const auto& s : in)
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  return out;
}

MixedStrategy to_mix(const std::vector<LabelSequence>& set, const Eigen::VectorXd& probs) {
  std::vector<LabelSequence> support;
  std::vector<double> p;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (probs[static_cast<Eigen::Index>(i)] > 0.0) {
      support.push_back(set[i]);
      p.push_back(probs[static_cast<Eigen::Index>(i)]);
    }
  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  v /= v.sum();
  return MixedStrategy(std::move(support), std::move(v));
}

Equilibrium<double> solve_restricted(const Eigen::MatrixXd& m, double lpTol) {
  try {
    return solve_zero_sum<double>(m, lpTol);
  } catch (const SolverFailure<double>& e) {
    // The deviation checks against the full game catch a poor incumbent.
    return e.incumbent();
  }
}

}  // namespace

double payoff_entry(const LabelSequence& pred, const LabelSequence& adv, const OracleGameConfig& cfg) {
  return payoff(cfg.score, cfg.psi, pred, adv);
}

GameSolution run_double_oracle(const OracleGameConfig& cfg, const BestResponseOracle& oracle) {
  if (!(cfg.convergenceTol > 0.0)) throw InvalidInput("double oracle: convergenceTol must be positive");
  if (cfg.maxIterations < 1) throw InvalidInput("double oracle: maxIterations must be >= 1");
  if (cfg.initialPredictor.empty() || cfg.initialAdversary.empty())
    throw InvalidInput("double oracle: initial strategy sets must be nonempty");

  std::vector<LabelSequence> rows = deduplicated(cfg.initialPredictor);
  std::vector<LabelSequence> cols = deduplicated(cfg.initialAdversary);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = payoff_entry(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)], cfg);

  auto addRow = [&](const LabelSequence& s) {
    rows.push_back(s);
    m.conservativeResize(m.rows() + 1, Eigen::NoChange);
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(m.rows() - 1, c) = payoff_entry(s, cols[static_cast<std::size_t>(c)], cfg);
  };
  auto addCol = [&](const LabelSequence& s) {
    cols.push_back(s);
    m.conservativeResize(Eigen::NoChange, m.cols() + 1);
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, m.cols() - 1) = payoff_entry(rows[static_cast<std::size_t>(r)], s, cfg);
  };
  auto contains = [](const std::vector<LabelSequence>& set, const LabelSequence& s) {
    return std::find(set.begin(), set.end(), s) != set.end();
  };

  double lpTol = cfg.lpTol;
  bool tightened = false;
  for (int iteration = 1;; ++iteration) {
    const Equilibrium<double> eq = solve_restricted(m, lpTol);
    GameSolution sol{to_mix(rows, eq.rowMix), to_mix(cols, eq.colMix), 0.0, 0.0, 0.0, 0.0, false, 0, {}, {}};
    sol.value = eq.value;
    sol.iterations = iteration;

    const BestResponse adversaryBr = oracle.adversary_br(sol.predictor, cfg.psi);
    const BestResponse predictorBr = oracle.predictor_br(sol.adversary, cfg.psi);
    sol.adversaryBrValue = adversaryBr.value;
    sol.predictorBrValue = predictorBr.value;
    sol.gap = predictorBr.value - adversaryBr.value;

    const bool adversaryImproves = eq.value - adversaryBr.value > cfg.convergenceTol;
    const bool predictorImproves = predictorBr.value - eq.value > cfg.convergenceTol;
    bool added = false;
    if (adversaryImproves && !contains(cols, adversaryBr.seq)) {
      addCol(adversaryBr.seq);
      added = true;
    }
    if (predictorImproves && !contains(rows, predictorBr.seq)) {
      addRow(predictorBr.seq);
      added = true;
    }

    bool done = false;
    if (!adversaryImproves && !predictorImproves) {
      sol.certified = oracle.exact();
      done = true;
    } else if (!added) {
      // A best response already in the set that still looks improving means
      // the restricted solve drifted. Retry once with a tighter LP tolerance.
      if (!tightened) {
        tightened = true;
        lpTol *= 1e-3;
      } else {
        done = true;
      }
    } else if (iteration >= cfg.maxIterations) {
      done = true;
    }
    if (done) {
      sol.predictorSet = std::move(rows);
      sol.adversarySet = std::move(cols);
      return sol;
    }
  }
}

void seed_from_gold(OracleGameConfig& cfg, const LabelSequence& gold, const BestResponseOracle& oracle) {
  cfg.initialAdversary = {gold};
  cfg.initialPredictor = {oracle.predictor_br(MixedStrategy::pure(gold), cfg.psi).seq};
}

void seed_without_gold(OracleGameConfig& cfg, std::size_t n, Tag predictorNone, const BestResponseOracle& oracle) {
  LabelSequence none(n, predictorNone);
  cfg.initialAdversary = {oracle.adversary_br(MixedStrategy::pure(none), cfg.psi).seq};
  cfg.initialPredictor = {std::move(none)};
}

std::unique_ptr<BestResponseOracle> make_oracle(const ScoreKind& kind, BrMode mode) {
  switch (kind.kind) {
    case ScoreKindTag::F1:
      return std::make_unique<F1Oracle>(kind.target, mode);
    case ScoreKindTag::Aer:
      return std::make_unique<AerOracle>();
    case ScoreKindTag::Bipartite:
      return std::make_unique<BipartiteOracle>(kind.cost, kind.grid);
  }
  throw InvalidInput("unknown score kind");
}

}  // namespace mpg
