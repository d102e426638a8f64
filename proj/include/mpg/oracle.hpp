#pragma once

// Reference implementations by enumeration. Slow by design; every fast
// oracle is checked against these.

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "mpg/core.hpp"
#include "mpg/game.hpp"
#include "mpg/matrix_game.hpp"

namespace mpg {

struct EnumerationBudget {
  long maxPayoffs = 2'000'000;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Side { Predictor, Adversary };

/// Every pure strategy of `side` for sequences of length n, in
/// lexicographic order of tag indices. F1 predictors are target masks
/// (filler elsewhere); bipartite strategies respect the grid. Throws
/// BudgetExceeded when the raw space exceeds the budget.
std::vector<LabelSequence> strategy_space(const ScoreKind& kind, std::size_t n, Side side,
                                          const EnumerationBudget& budget = {});

/// Literal argmax (predictor) or argmin (adversary) of the expected payoff
/// against `opponent`; the first optimum in enumeration order wins.
BestResponse exhaustive_br(const MixedStrategy& opponent, const ScoreKind& kind, const PotentialTable& psi, Side side,
                           const EnumerationBudget& budget = {});

struct FullGame {
  std::vector<LabelSequence> rows;  // predictor
  std::vector<LabelSequence> cols;  // adversary
  Eigen::MatrixXd payoff;
  Equilibrium<double> equilibrium;
};

FullGame full_payoff_matrix(const ScoreKind& kind, const PotentialTable& psi, std::size_t n,
                            const EnumerationBudget& budget = {});

/// Builds the complete game and solves it.
FullGame exhaustive_equilibrium(const ScoreKind& kind, const PotentialTable& psi, std::size_t n,
                                const EnumerationBudget& budget = {});

class ExhaustiveOracle : public BestResponseOracle {
 public:
  ExhaustiveOracle(ScoreKind kind, EnumerationBudget budget = {}) : kind_(kind), budget_(budget) {}
  BestResponse predictor_br(const MixedStrategy& adversary, const PotentialTable& psi) const override;
  BestResponse adversary_br(const MixedStrategy& predictor, const PotentialTable& psi) const override;

 private:
  ScoreKind kind_;
  EnumerationBudget budget_;
};

}  // namespace mpg
