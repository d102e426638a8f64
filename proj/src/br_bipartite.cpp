#include "mpg/br_bipartite.hpp"

#include <algorithm>
#include <limits>

namespace mpg {

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw InvalidInput("assignment: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials u (rows) and v (columns); p[j] is the row matched to
  // column j, with column 0 as the augmenting-path root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

Matching max_weight_matching(const Eigen::MatrixXd& weights) {
  if (!weights.allFinite()) throw InvalidInput("matching: weights must be finite");
  const auto R = weights.rows(), C = weights.cols();
  const auto N = std::max(R, C);
  // Padding and clipping at zero turn "leave unmatched" into a zero-weight
  // dummy assignment.
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(N, N);
  cost.topLeftCorner(R, C) = -weights.cwiseMax(0.0);
  const std::vector<int> assignment = min_cost_assignment(cost);

  Matching m;
  for (Eigen::Index r = 0; r < R; ++r) {
    const int c = assignment[r];
    if (c < C && weights(r, c) > 0.0) {
      m.edges.emplace_back(static_cast<int>(r), c);
      m.weight += weights(r, c);
    }
  }
  return m;
}

namespace {

void require_feasible(const MixedStrategy& mix, const MatchingConstraint& grid, Tag none) {
  for (const LabelSequence& s : mix.support())
    if (!grid.feasible(s, none)) throw InvalidInput("bipartite: opponent strategy violates the matching constraint");
}

const AlignmentPotentials& alignment_psi(const PotentialTable& psi) {
  const auto* p = std::get_if<AlignmentPotentials>(&psi);
  if (!p) throw InvalidInput("bipartite game requires alignment potentials");
  return *p;
}

}  // namespace

BestResponse bip_predictor_br(const MixedStrategy& adversaryMix, const CostFunction& cost,
                              const MatchingConstraint& grid) {
  require_feasible(adversaryMix, grid, adv::N);
  const int n = grid.edges();
  if (static_cast<int>(adversaryMix.length()) != n) throw InvalidInput("bipartite: mix/grid size mismatch");
  Eigen::MatrixXd gain(grid.sourceCount, grid.targetCount);
  for (int i = 0; i < n; ++i) {
    double g = 0.0;
    for (std::size_t s = 0; s < adversaryMix.size(); ++s) {
      const Tag y = adversaryMix.sequence(s)[static_cast<std::size_t>(i)];
      g += adversaryMix.prob(s) * (cost(pred::N, y) - cost(pred::A, y));
    }
    gain(i / grid.targetCount, i % grid.targetCount) = g;
  }
  const Matching m = max_weight_matching(gain);
  LabelSequence seq(static_cast<std::size_t>(n), pred::N);
  for (auto [s, t] : m.edges) seq[static_cast<std::size_t>(s * grid.targetCount + t)] = pred::A;
  const ScoreKind kind = ScoreKind::bipartite(cost, grid);
  const double value = adversaryMix.expect([&](const LabelSequence& y) { return score(kind, seq, y); });
  return {std::move(seq), value};
}

BestResponse bip_adversary_br(const MixedStrategy& predictorMix, const CostFunction& cost,
                              const AlignmentPotentials& psi, const MatchingConstraint& grid) {
  require_feasible(predictorMix, grid, pred::N);
  const int n = grid.edges();
  if (static_cast<int>(predictorMix.length()) != n || psi.length() != n)
    throw InvalidInput("bipartite: mix/grid size mismatch");
  const Eigen::VectorXd pA = predictorMix.position_marginals(pred::A);

  Eigen::MatrixXd gain(grid.sourceCount, grid.targetCount);
  std::vector<Tag> linkTag(n, adv::P);
  for (int i = 0; i < n; ++i) {
    // Expected per-edge payoff for each adversary tag.
    auto edgeCost = [&](Tag y) {
      const double psiTerm = y == adv::S ? psi.psiS[i] : (y == adv::P ? psi.psiR[i] : 0.0);
      return pA[i] * (1.0 - cost(pred::A, y)) + (1.0 - pA[i]) * (1.0 - cost(pred::N, y)) - psiTerm;
    };
    const double cP = edgeCost(adv::P), cS = edgeCost(adv::S);
    linkTag[i] = cS < cP ? adv::S : adv::P;
    gain(i / grid.targetCount, i % grid.targetCount) = edgeCost(adv::N) - std::min(cP, cS);
  }
  const Matching m = max_weight_matching(gain);
  LabelSequence seq(static_cast<std::size_t>(n), adv::N);
  for (auto [s, t] : m.edges) {
    const auto i = static_cast<std::size_t>(s * grid.targetCount + t);
    seq[i] = linkTag[i];
  }
  const ScoreKind kind = ScoreKind::bipartite(cost, grid);
  const double value = expected_payoff_vs_predictor(kind, psi, predictorMix, seq);
  return {std::move(seq), value};
}

BestResponse BipartiteOracle::predictor_br(const MixedStrategy& adversary, const PotentialTable& psi) const {
  const AlignmentPotentials& p = alignment_psi(psi);
  BestResponse br = bip_predictor_br(adversary, cost_, grid_);
  br.value -= adversary.expect([&](const LabelSequence& a) { return lagrangian(a, p); });
  return br;
}

BestResponse BipartiteOracle::adversary_br(const MixedStrategy& predictor, const PotentialTable& psi) const {
  return bip_adversary_br(predictor, cost_, alignment_psi(psi), grid_);
}

}  // namespace mpg
