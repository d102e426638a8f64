#include "mpg/game.hpp"

#include <vector>

namespace mpg {

bool MatchingConstraint::feasible(const LabelSequence& seq, Tag none) const {
  if (static_cast<int>(seq.size()) != edges()) return false;
  std::vector<int> rows(static_cast<std::size_t>(sourceCount), 0), cols(static_cast<std::size_t>(targetCount), 0);
  for (int s = 0; s < sourceCount; ++s)
    for (int t = 0; t < targetCount; ++t)
      if (seq[static_cast<std::size_t>(s * targetCount + t)] != none) {
        if (++rows[static_cast<std::size_t>(s)] > 1 || ++cols[static_cast<std::size_t>(t)] > 1) return false;
      }
  return true;
}

double score(const ScoreKind& kind, const LabelSequence& pred, const LabelSequence& adv) {
  switch (kind.kind) {
    case ScoreKindTag::F1:
      return f1_score(pred, adv, kind.target);
    case ScoreKindTag::Aer:
      return 1.0 - aer_score(pred, adv);
    case ScoreKindTag::Bipartite: {
      if (pred.size() != adv.size()) throw InvalidInput("bipartite score: length mismatch");
      double acc = 0.0;
      for (std::size_t i = 0; i < pred.size(); ++i) acc += 1.0 - kind.cost(pred[i], adv[i]);
      return acc;
    }
  }
  return 0.0;
}

double payoff(const ScoreKind& kind, const PotentialTable& psi, const LabelSequence& pred, const LabelSequence& adv) {
  return score(kind, pred, adv) - lagrangian(adv, psi);
}

double expected_payoff_vs_adversary(const ScoreKind& kind, const PotentialTable& psi, const LabelSequence& pred,
                                    const MixedStrategy& adversary) {
  return adversary.expect([&](const LabelSequence& a) { return payoff(kind, psi, pred, a); });
}

double expected_payoff_vs_predictor(const ScoreKind& kind, const PotentialTable& psi, const MixedStrategy& predictor,
                                    const LabelSequence& adv) {
  return predictor.expect([&](const LabelSequence& p) { return score(kind, p, adv); }) - lagrangian(adv, psi);
}

}  // namespace mpg
