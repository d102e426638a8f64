#include "mpg/br_fscore.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

namespace mpg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// W(kh-1, k-1) = 2 / (kh + k)
Eigen::MatrixXd harmonic_weights(int n, double numerator, int offset) {
  Eigen::MatrixXd w(n, n);
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b) w(a - 1, b - 1) = numerator / static_cast<double>(a + b + offset);
  return w;
}

const ChainPotentials& chain_psi(const PotentialTable& psi) {
  const auto* p = std::get_if<ChainPotentials>(&psi);
  if (!p) throw InvalidInput("F1 game requires chain potentials");
  return *p;
}

}  // namespace

Eigen::MatrixXd f1_cost_grid(const MarginalCountMatrix& marginals) {
  const int n = marginals.length();
  return marginals.entries * harmonic_weights(n, 2.0, 0);
}

LcfmSolver::LcfmSolver(Eigen::MatrixXd costGrid, const ChainPotentials& psi, Tag target)
    : cost_(std::move(costGrid)), psi_(psi), target_(target), n_(psi.length()), m_(psi.classes()) {
  if (cost_.rows() != n_ || cost_.cols() != n_) throw InvalidInput("LCFM: cost grid must be n x n");
  if (target_ < 0 || target_ >= m_) throw InvalidInput("LCFM: target class out of range");
  tables_.resize(static_cast<std::size_t>(n_) + 1);
}

std::size_t LcfmSolver::slot(int t, Tag prev, int r, int k) const {
  return (static_cast<std::size_t>(t) * static_cast<std::size_t>(m_ + 1) + static_cast<std::size_t>(prev)) *
             static_cast<std::size_t>(k + 1) +
         static_cast<std::size_t>(r);
}

const LcfmSolver::Table& LcfmSolver::table(int k) const {
  auto& cached = tables_[static_cast<std::size_t>(k)];
  if (cached) return *cached;

  Table tab;
  const std::size_t size = static_cast<std::size_t>(n_ + 1) * static_cast<std::size_t>(m_ + 1) *
                           static_cast<std::size_t>(k + 1);
  tab.value.assign(size, kNegInf);
  tab.choice.assign(size, -1);
  for (Tag prev = 0; prev <= m_; ++prev) tab.value[slot(n_, prev, 0, k)] = 0.0;

  for (int t = n_ - 1; t >= 0; --t) {
    for (Tag prev = 0; prev <= m_; ++prev) {
      for (int r = 0; r <= k; ++r) {
        double best = kNegInf;
        Tag arg = -1;
        for (Tag c = 0; c < m_; ++c) {
          const bool isTarget = c == target_;
          if (isTarget && r == 0) continue;
          const double rest = tab.value[slot(t + 1, c, r - (isTarget ? 1 : 0), k)];
          if (rest == kNegInf) continue;
          const double f = (isTarget && k > 0) ? cost_(t, k - 1) : 0.0;
          const double cand = psi_.step(t, prev, c) - f + rest;
          if (cand > best) {
            best = cand;
            arg = c;
          }
        }
        tab.value[slot(t, prev, r, k)] = best;
        tab.choice[slot(t, prev, r, k)] = arg;
      }
    }
  }
  cached = std::move(tab);
  return *cached;
}

std::pair<LabelSequence, double> LcfmSolver::msum(Tag prev, int t, int r, int k) const {
  if (k < 0 || k > n_ || r < 0 || r > k) throw InvalidInput("msum: requires 0 <= r <= k <= n");
  if (t < 0 || t > n_ || prev < 0 || prev > m_) throw InvalidInput("msum: state out of range");
  const Table& tab = table(k);
  const double value = tab.value[slot(t, prev, r, k)];
  std::vector<Tag> suffix;
  if (value == kNegInf) return {LabelSequence(std::move(suffix)), value};
  for (int pos = t; pos < n_; ++pos) {
    const Tag c = tab.choice[slot(pos, prev, r, k)];
    suffix.push_back(c);
    if (c == target_) --r;
    prev = c;
  }
  return {LabelSequence(std::move(suffix)), value};
}

BestResponse lcfm_adversary_br(const MixedStrategy& predictorMix, const ChainPotentials& psi, Tag target) {
  const int n = psi.length();
  if (static_cast<int>(predictorMix.length()) != n) throw InvalidInput("LCFM: mix/potential length mismatch");
  const MarginalCountMatrix marg = marginal_count_matrix(predictorMix, target);
  const LcfmSolver solver(f1_cost_grid(marg), psi, target);

  // E(k) is maximised; the game value is -E.
  auto [bestSeq, bestE] = solver.msum(psi.start(), 0, 0, 0);
  bestE -= marg.emptyMass;
  for (int k = 1; k <= n; ++k) {
    auto [seq, e] = solver.msum(psi.start(), 0, k, k);
    if (e > bestE) {
      bestE = e;
      bestSeq = std::move(seq);
    }
  }
  return {std::move(bestSeq), -bestE};
}

BestResponse gfm_predictor_br(const MixedStrategy& adversaryMix, Tag target) {
  const int n = static_cast<int>(adversaryMix.length());
  const MarginalCountMatrix marg = marginal_count_matrix(adversaryMix, target);
  const Eigen::MatrixXd F = f1_cost_grid(marg);

  double bestValue = marg.emptyMass;
  std::vector<int> bestPositions;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return F(a, k - 1) > F(b, k - 1); });
    double value = 0.0;
    for (int j = 0; j < k; ++j) value += F(order[static_cast<std::size_t>(j)], k - 1);
    if (value > bestValue) {
      bestValue = value;
      bestPositions.assign(order.begin(), order.begin() + k);
    }
  }
  LabelSequence seq(static_cast<std::size_t>(n), filler_class(target));
  for (int pos : bestPositions) seq[static_cast<std::size_t>(pos)] = target;
  return {std::move(seq), bestValue};
}

double expected_f1_as_predictor(const LabelSequence& pred, const MixedStrategy& adversary, Tag target) {
  return adversary.expect([&](const LabelSequence& a) { return f1_score(pred, a, target); });
}

double expected_f1_as_adversary(const MixedStrategy& predictor, const LabelSequence& adv, Tag target) {
  return predictor.expect([&](const LabelSequence& p) { return f1_score(p, adv, target); });
}

BestResponse approx_adversary_br(const MixedStrategy& predictorMix, const ChainPotentials& psi, Tag target) {
  const int n = psi.length(), m = psi.classes();
  if (static_cast<int>(predictorMix.length()) != n) throw InvalidInput("approx BR: mix/potential length mismatch");
  const Eigen::VectorXd P = predictorMix.position_marginals(target);

  // Affine map of the per-step potential range onto [-1, 1].
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int t = 0; t < n; ++t)
    for (Tag prev = 0; prev <= m; ++prev) {
      if ((t == 0) != (prev == psi.start())) continue;
      for (Tag c = 0; c < m; ++c) {
        lo = std::min(lo, psi.step(t, prev, c));
        hi = std::max(hi, psi.step(t, prev, c));
      }
    }
  auto scaled = [&](int t, Tag prev, Tag c) {
    const double v = psi.step(t, prev, c);
    return hi > lo ? 2.0 * (v - lo) / (hi - lo) - 1.0 : v;
  };

  std::set<LabelSequence> candidates;
  Eigen::MatrixXd alpha(n, m);
  Eigen::MatrixXi back(n, m);
  for (int wi = 1; wi <= 10; ++wi) {
    const double w = wi / 10.0;
    const double fpGain = w, fnGain = 2.0 - w;
    auto gain = [&](int t, Tag c) { return c == target ? (1.0 - P[t]) * fpGain : P[t] * fnGain; };
    for (Tag c = 0; c < m; ++c) alpha(0, c) = scaled(0, psi.start(), c) + gain(0, c);
    for (int t = 1; t < n; ++t)
      for (Tag c = 0; c < m; ++c) {
        double best = -std::numeric_limits<double>::infinity();
        int arg = 0;
        for (Tag prev = 0; prev < m; ++prev) {
          const double cand = alpha(t - 1, prev) + scaled(t, prev, c);
          if (cand > best) {
            best = cand;
            arg = prev;
          }
        }
        alpha(t, c) = best + gain(t, c);
        back(t, c) = arg;
      }
    std::vector<Tag> tags(static_cast<std::size_t>(n));
    Eigen::Index last = 0;
    alpha.row(n - 1).maxCoeff(&last);
    tags[static_cast<std::size_t>(n - 1)] = static_cast<Tag>(last);
    for (int t = n - 1; t > 0; --t)
      tags[static_cast<std::size_t>(t - 1)] = back(t, tags[static_cast<std::size_t>(t)]);
    candidates.insert(LabelSequence(std::move(tags)));
  }

  BestResponse best{*candidates.begin(), std::numeric_limits<double>::infinity()};
  for (const LabelSequence& cand : candidates) {
    const double v = expected_f1_as_adversary(predictorMix, cand, target) - lagrangian(cand, psi);
    if (v < best.value) best = {cand, v};
  }
  return best;
}

BestResponse approx_predictor_br(const MixedStrategy& adversaryMix, Tag target) {
  const int n = static_cast<int>(adversaryMix.length());
  const Eigen::VectorXd Q = adversaryMix.position_marginals(target);
  std::set<LabelSequence> candidates;
  for (int wi = 1; wi <= 10; ++wi) {
    // Predict the target where the expected false-negative cost Q(2-w)
    // exceeds the false-positive cost (1-Q)w, i.e. Q > w/2.
    const double threshold = wi / 20.0;
    LabelSequence seq(static_cast<std::size_t>(n), filler_class(target));
    for (int t = 0; t < n; ++t)
      if (Q[t] > threshold) seq[static_cast<std::size_t>(t)] = target;
    candidates.insert(std::move(seq));
  }
  BestResponse best{*candidates.begin(), -std::numeric_limits<double>::infinity()};
  for (const LabelSequence& cand : candidates) {
    const double v = expected_f1_as_predictor(cand, adversaryMix, target);
    if (v > best.value) best = {cand, v};
  }
  return best;
}

BestResponse F1Oracle::predictor_br(const MixedStrategy& adversary, const PotentialTable& psi) const {
  const ChainPotentials& p = chain_psi(psi);
  BestResponse br = mode_ == BrMode::Exact ? gfm_predictor_br(adversary, target_) : approx_predictor_br(adversary, target_);
  br.value -= adversary.expect([&](const LabelSequence& a) { return lagrangian(a, p); });
  return br;
}

BestResponse F1Oracle::adversary_br(const MixedStrategy& predictor, const PotentialTable& psi) const {
  const ChainPotentials& p = chain_psi(psi);
  return mode_ == BrMode::Exact ? lcfm_adversary_br(predictor, p, target_) : approx_adversary_br(predictor, p, target_);
}

}  // namespace mpg
