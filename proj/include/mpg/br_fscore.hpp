#pragma once

// Best responses for the per-class F1 game over linear chains.

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mpg/core.hpp"
#include "mpg/game.hpp"

namespace mpg {

/// f(t, k-1) = 2 * sum_{kh} P(t, kh) / (kh + k) for counts k = 1..n, where P
/// is the opponent's marginal count matrix.
Eigen::MatrixXd f1_cost_grid(const MarginalCountMatrix& marginals);

/// Exact adversary oracle: a dynamic program over (previous class, position,
/// remaining target count), run once per total target count k.
class LcfmSolver {
 public:
  LcfmSolver(Eigen::MatrixXd costGrid, const ChainPotentials& psi, Tag target);

  /// Best suffix from position t (0-based; t == n is past the end) after
  /// class `prev` (psi.start() before the first position), containing exactly
  /// r more target tags, scored as sum of psi - f(t,k) * [target] * [k > 0].
  /// Infeasible suffixes return -infinity.
  std::pair<LabelSequence, double> msum(Tag prev, int t, int r, int k) const;

  int length() const { return n_; }

 private:
  struct Table {
    // Indexed [(t * (m+1) + prev) * (k+1) + r].
    std::vector<double> value;
    std::vector<Tag> choice;
  };
  const Table& table(int k) const;
  std::size_t slot(int t, Tag prev, int r, int k) const;

  Eigen::MatrixXd cost_;
  const ChainPotentials& psi_;
  Tag target_;
  int n_;
  int m_;
  mutable std::vector<std::optional<Table>> tables_;
};

/// argmin over all chains of E[F1(pred, y)] - psi(y).
BestResponse lcfm_adversary_br(const MixedStrategy& predictorMix, const ChainPotentials& psi, Tag target);

/// argmax over target masks of E[F1(y, adv)]; psi plays no role. Non-target
/// positions carry filler_class(target).
BestResponse gfm_predictor_br(const MixedStrategy& adversaryMix, Tag target);

/// Cost-sensitive Viterbi candidates over w in {0.1, ..., 1.0}, scored under
/// the true objective E[F1] - psi.
BestResponse approx_adversary_br(const MixedStrategy& predictorMix, const ChainPotentials& psi, Tag target);

/// Independent per-position thresholds on the adversary's target marginals,
/// scored under the true expected F1.
BestResponse approx_predictor_br(const MixedStrategy& adversaryMix, Tag target);

/// E over `opponent` of F1(y as prediction, opponent) or F1(opponent, y).
double expected_f1_as_predictor(const LabelSequence& pred, const MixedStrategy& adversary, Tag target);
double expected_f1_as_adversary(const MixedStrategy& predictor, const LabelSequence& adv, Tag target);

class F1Oracle : public BestResponseOracle {
 public:
  F1Oracle(Tag target, BrMode mode = BrMode::Exact) : target_(target), mode_(mode) {}
  BestResponse predictor_br(const MixedStrategy& adversary, const PotentialTable& psi) const override;
  BestResponse adversary_br(const MixedStrategy& predictor, const PotentialTable& psi) const override;
  bool exact() const override { return mode_ == BrMode::Exact; }

 private:
  Tag target_;
  BrMode mode_;
};

}  // namespace mpg
