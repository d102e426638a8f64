#include "mpg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpg {

namespace {

int alphabet_size(const ScoreKind& kind, Side side) {
  if (kind.kind == ScoreKindTag::F1) {
    if (side == Side::Predictor) return 2;
    if (kind.classes < 2) throw InvalidInput("F1 score kind needs at least two classes");
    return kind.classes;
  }
  return side == Side::Predictor ? 2 : 3;
}

long checked_power(long base, std::size_t n, long cap) {
  long size = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (size > cap / base) return cap + 1;
    size *= base;
  }
  return size;
}

}  // namespace

std::vector<LabelSequence> strategy_space(const ScoreKind& kind, std::size_t n, Side side,
                                          const EnumerationBudget& budget) {
  if (n == 0) throw InvalidInput("strategy_space: empty sequences");
  if (budget.maxPayoffs <= 0) throw InvalidInput("enumeration budget must be positive");
  const int a = alphabet_size(kind, side);
  const long size = checked_power(a, n, budget.maxPayoffs);
  if (size > budget.maxPayoffs)
    throw BudgetExceeded("strategy space of " + std::to_string(a) + "^" + std::to_string(n) + " exceeds the budget");

  std::vector<LabelSequence> out;
  out.reserve(static_cast<std::size_t>(size));
  std::vector<Tag> digits(n, 0);
  const bool mask = kind.kind == ScoreKindTag::F1 && side == Side::Predictor;
  const Tag filler = filler_class(kind.target);
  for (long code = 0; code < size; ++code) {
    LabelSequence seq(n, 0);
    for (std::size_t i = 0; i < n; ++i) seq[i] = mask ? (digits[i] ? kind.target : filler) : digits[i];
    const Tag none = side == Side::Predictor ? pred::N : adv::N;
    if (kind.kind != ScoreKindTag::Bipartite || kind.grid.feasible(seq, none)) out.push_back(std::move(seq));
    for (std::size_t i = n; i-- > 0;) {
      if (++digits[i] < a) break;
      digits[i] = 0;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

BestResponse exhaustive_br(const MixedStrategy& opponent, const ScoreKind& kind, const PotentialTable& psi, Side side,
                           const EnumerationBudget& budget) {
  const std::vector<LabelSequence> space = strategy_space(kind, opponent.length(), side, budget);
  if (static_cast<double>(space.size()) * static_cast<double>(opponent.size()) > static_cast<double>(budget.maxPayoffs))
    throw BudgetExceeded("exhaustive best response exceeds the budget");
  BestResponse best{space.front(), 0.0};
  bool first = true;
  for (const LabelSequence& s : space) {
    const double v = side == Side::Predictor ? expected_payoff_vs_adversary(kind, psi, s, opponent)
                                             : expected_payoff_vs_predictor(kind, psi, opponent, s);
    if (first || (side == Side::Predictor ? v > best.value : v < best.value)) {
      best = {s, v};
      first = false;
    }
  }
  return best;
}

FullGame full_payoff_matrix(const ScoreKind& kind, const PotentialTable& psi, std::size_t n,
                            const EnumerationBudget& budget) {
  FullGame g;
  g.rows = strategy_space(kind, n, Side::Predictor, budget);
  g.cols = strategy_space(kind, n, Side::Adversary, budget);
  if (static_cast<double>(g.rows.size()) * static_cast<double>(g.cols.size()) > static_cast<double>(budget.maxPayoffs))
    throw BudgetExceeded("full game matrix of " + std::to_string(g.rows.size()) + "x" + std::to_string(g.cols.size()) +
                         " exceeds the budget");
  g.payoff.resize(static_cast<Eigen::Index>(g.rows.size()), static_cast<Eigen::Index>(g.cols.size()));
  std::vector<double> colPsi(g.cols.size());
  for (std::size_t c = 0; c < g.cols.size(); ++c) colPsi[c] = lagrangian(g.cols[c], psi);
  for (std::size_t r = 0; r < g.rows.size(); ++r)
    for (std::size_t c = 0; c < g.cols.size(); ++c)
      g.payoff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = score(kind, g.rows[r], g.cols[c]) - colPsi[c];
  return g;
}

FullGame exhaustive_equilibrium(const ScoreKind& kind, const PotentialTable& psi, std::size_t n,
                                const EnumerationBudget& budget) {
  FullGame g = full_payoff_matrix(kind, psi, n, budget);
  g.equilibrium = solve_zero_sum<double>(g.payoff);
  return g;
}

BestResponse ExhaustiveOracle::predictor_br(const MixedStrategy& adversary, const PotentialTable& psi) const {
  return exhaustive_br(adversary, kind_, psi, Side::Predictor, budget_);
}

BestResponse ExhaustiveOracle::adversary_br(const MixedStrategy& predictor, const PotentialTable& psi) const {
  return exhaustive_br(predictor, kind_, psi, Side::Adversary, budget_);
}

}  // namespace mpg
