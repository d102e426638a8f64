#pragma once

// Constraint generation for games whose strategy spaces are too large to
// write down: grow each player's pure-strategy set with best responses to
// the opponent's restricted-game equilibrium until neither side improves.

#include <memory>
#include <vector>

#include "mpg/core.hpp"
#include "mpg/game.hpp"

namespace mpg {

struct OracleGameConfig {
  ScoreKind score;
  PotentialTable psi;
  double convergenceTol = 1e-6;
  int maxIterations = 500;
  double lpTol = 1e-9;
  std::vector<LabelSequence> initialPredictor;
  std::vector<LabelSequence> initialAdversary;
};

struct GameSolution {
  MixedStrategy predictor;
  MixedStrategy adversary;
  double value = 0.0;
  // Predictor best-response value minus adversary best-response value
  // against the returned mixes, over the full game.
  double gap = 0.0;
  double predictorBrValue = 0.0;
  double adversaryBrValue = 0.0;
  bool certified = false;
  int iterations = 0;
  // Final strategy sets; reusable as the next solve's initial sets.
  std::vector<LabelSequence> predictorSet;
  std::vector<LabelSequence> adversarySet;
};

/// score - lagrangian(adv, psi) under cfg.score.
double payoff_entry(const LabelSequence& pred, const LabelSequence& adv, const OracleGameConfig& cfg);

/// Runs double oracle from the configured initial sets. When the oracle is
/// exact and the loop stops on its own, gap <= 2 * convergenceTol and the
/// result is certified. Hitting maxIterations (or an inexact oracle)
/// returns the incumbent uncertified.
GameSolution run_double_oracle(const OracleGameConfig& cfg, const BestResponseOracle& oracle);

/// Initial sets used for training: the gold sequence for the adversary and
/// the predictor's best response to it.
void seed_from_gold(OracleGameConfig& cfg, const LabelSequence& gold, const BestResponseOracle& oracle);

/// Initial sets when no gold is available: the predictor's all-`none`
/// sequence and the adversary's best response to it.
void seed_without_gold(OracleGameConfig& cfg, std::size_t n, Tag predictorNone, const BestResponseOracle& oracle);

/// Exact or approximate oracle for a score kind. Only the F1 game has
/// approximate oracles; the others ignore `mode`.
std::unique_ptr<BestResponseOracle> make_oracle(const ScoreKind& kind, BrMode mode);

}  // namespace mpg
