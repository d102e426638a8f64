#pragma once

// Random games for equivalence suites and benchmarks.

#include <algorithm>

#include "mpg/core.hpp"
#include "mpg/data_io.hpp"
#include "mpg/game.hpp"

namespace mpg {

/// Uniform tags over [0, alphabet). With probability `allFill` the sequence
/// is all `fill` instead, so empty-count cases show up often.
LabelSequence random_sequence(Rng& rng, std::size_t n, int alphabet, Tag fill = 0, double allFill = 0.0);

/// Random feasible matching over the grid: a random subset of a random
/// permutation's edges, tagged uniformly from `linkTags`.
LabelSequence random_matching(Rng& rng, const MatchingConstraint& grid, const std::vector<Tag>& linkTags);

/// Up to maxSupport distinct sequences drawn by `draw` with Dirichlet-like
/// random weights.
template <typename Draw>
MixedStrategy random_mix(Rng& rng, int maxSupport, Draw&& draw) {
  std::vector<LabelSequence> support;
  const int want = 1 + rng.below(maxSupport);
  for (int tries = 0; static_cast<int>(support.size()) < want && tries < 4 * want; ++tries) {
    LabelSequence s = draw();
    if (std::find(support.begin(), support.end(), s) == support.end()) support.push_back(std::move(s));
  }
  Eigen::VectorXd p(static_cast<Eigen::Index>(support.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = 0.05 + rng.uniform();
  p /= p.sum();
  return MixedStrategy(std::move(support), std::move(p));
}

/// Entries uniform on [-scale, scale].
ChainPotentials random_chain_potentials(Rng& rng, int n, int m, double scale);
AlignmentPotentials random_alignment_potentials(Rng& rng, int n, double scale);

}  // namespace mpg
