#pragma once

// Scores, payoffs and the best-response interface shared by every game.

#include "mpg/core.hpp"

namespace mpg {

/// Per-edge loss C(predTag, advTag) of the bipartite game.
struct CostFunction {
  // [pred N/A][adv N/P/S]
  double table[2][3] = {{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}};

  static CostFunction hamming_like() { return {}; }
  double operator()(Tag predTag, Tag advTag) const { return table[predTag][advTag]; }
};

/// Source x target grid; each source row and each target column carries at
/// most one link (A for the predictor, S or P for the adversary).
struct MatchingConstraint {
  int sourceCount = 0;
  int targetCount = 0;

  int edges() const { return sourceCount * targetCount; }
  bool feasible(const LabelSequence& seq, Tag none) const;
};

enum class ScoreKindTag { F1, Aer, Bipartite };

struct ScoreKind {
  ScoreKindTag kind = ScoreKindTag::Aer;
  Tag target = 0;                // F1 only
  int classes = 0;               // F1 only
  CostFunction cost;             // Bipartite only
  MatchingConstraint grid;       // Bipartite only

  static ScoreKind f1(Tag target, int classes) { return {ScoreKindTag::F1, target, classes, {}, {}}; }
  static ScoreKind aer() { return {}; }
  static ScoreKind bipartite(CostFunction cost, MatchingConstraint grid) {
    return {ScoreKindTag::Bipartite, 0, 0, cost, grid};
  }
};

/// F1 predictor sequences are target masks; non-target positions carry this
/// class (the lowest non-target index).
inline Tag filler_class(Tag target) { return target == 0 ? 1 : 0; }

/// score(pred, adv): F1 for the target, 1 - AER, or sum of (1 - C) over edges.
double score(const ScoreKind& kind, const LabelSequence& pred, const LabelSequence& adv);

/// score(pred, adv) - psi(adv), one entry of the game matrix.
double payoff(const ScoreKind& kind, const PotentialTable& psi, const LabelSequence& pred, const LabelSequence& adv);

/// Expected payoff of a pure predictor sequence against an adversary mix,
/// and of a pure adversary sequence against a predictor mix.
double expected_payoff_vs_adversary(const ScoreKind& kind, const PotentialTable& psi, const LabelSequence& pred,
                                    const MixedStrategy& adversary);
double expected_payoff_vs_predictor(const ScoreKind& kind, const PotentialTable& psi, const MixedStrategy& predictor,
                                    const LabelSequence& adv);

enum class BrMode { Exact, Approximate };

struct BestResponse {
  LabelSequence seq;
  double value = 0.0;
};

/// Best responses in the game with payoff score - psi(adversary).
class BestResponseOracle {
 public:
  virtual ~BestResponseOracle() = default;
  /// Maximiser against an adversary mix; value includes -E[psi].
  virtual BestResponse predictor_br(const MixedStrategy& adversary, const PotentialTable& psi) const = 0;
  /// Minimiser against a predictor mix.
  virtual BestResponse adversary_br(const MixedStrategy& predictor, const PotentialTable& psi) const = 0;
  /// False for heuristics; equilibria computed with them are not certified.
  virtual bool exact() const { return true; }
};

}  // namespace mpg
