#pragma once

// Best responses for the bipartite-matching alignment game: additive
// per-edge losses, one link per source row and target column.

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mpg/core.hpp"
#include "mpg/game.hpp"

namespace mpg {

struct Matching {
  std::vector<std::pair<int, int>> edges;  // (source, target), sorted
  double weight = 0.0;
};

/// Maximum-weight one-to-one partial matching. Edges of weight <= 0 are
/// never selected; the empty matching is allowed.
Matching max_weight_matching(const Eigen::MatrixXd& weights);

/// Hungarian method on a square cost matrix; returns column per row.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

BestResponse bip_predictor_br(const MixedStrategy& adversaryMix, const CostFunction& cost,
                              const MatchingConstraint& grid);

BestResponse bip_adversary_br(const MixedStrategy& predictorMix, const CostFunction& cost,
                              const AlignmentPotentials& psi, const MatchingConstraint& grid);

class BipartiteOracle : public BestResponseOracle {
 public:
  BipartiteOracle(CostFunction cost, MatchingConstraint grid) : cost_(cost), grid_(grid) {}
  BestResponse predictor_br(const MixedStrategy& adversary, const PotentialTable& psi) const override;
  BestResponse adversary_br(const MixedStrategy& predictor, const PotentialTable& psi) const override;

 private:
  CostFunction cost_;
  MatchingConstraint grid_;
};

}  // namespace mpg
