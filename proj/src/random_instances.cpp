#include "mpg/random_instances.hpp"

#include <numeric>

namespace mpg {

LabelSequence random_sequence(Rng& rng, std::size_t n, int alphabet, Tag fill, double allFill) {
  if (rng.uniform() < allFill) return LabelSequence(n, fill);
  LabelSequence s(n, 0);
  for (std::size_t i = 0; i < n; ++i) s[i] = rng.below(alphabet);
  return s;
}

LabelSequence random_matching(Rng& rng, const MatchingConstraint& grid, const std::vector<Tag>& linkTags) {
  std::vector<int> perm(static_cast<std::size_t>(grid.targetCount));
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.below(static_cast<int>(i)))]);
  LabelSequence s(static_cast<std::size_t>(grid.edges()), 0);
  const double keep = rng.uniform();
  for (int r = 0; r < grid.sourceCount && r < grid.targetCount; ++r)
    if (rng.uniform() < keep)
      s[static_cast<std::size_t>(r * grid.targetCount + perm[static_cast<std::size_t>(r)])] =
          linkTags[static_cast<std::size_t>(rng.below(static_cast<int>(linkTags.size())))];
  return s;
}

ChainPotentials random_chain_potentials(Rng& rng, int n, int m, double scale) {
  ChainPotentials psi = ChainPotentials::zeros(n, m);
  for (int t = 0; t < n; ++t)
    for (int c = 0; c < m; ++c) {
      psi.unigram(t, c) = scale * (2.0 * rng.uniform() - 1.0);
      for (int p = 0; p <= m; ++p) {
        // Only START precedes position 0.
        if ((t == 0) != (p == m)) continue;
        psi.transition[static_cast<std::size_t>(t)](p, c) = scale * (2.0 * rng.uniform() - 1.0);
      }
    }
  return psi;
}

AlignmentPotentials random_alignment_potentials(Rng& rng, int n, double scale) {
  AlignmentPotentials psi = AlignmentPotentials::zeros(n);
  for (int i = 0; i < n; ++i) {
    psi.psiS[i] = scale * (2.0 * rng.uniform() - 1.0);
    psi.psiR[i] = scale * (2.0 * rng.uniform() - 1.0);
  }
  return psi;
}

}  // namespace mpg
