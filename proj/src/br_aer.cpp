#include "mpg/br_aer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace mpg {

namespace {

const AlignmentPotentials& alignment_psi(const PotentialTable& psi) {
  const auto* p = std::get_if<AlignmentPotentials>(&psi);
  if (!p) throw InvalidInput("AER game requires alignment potentials");
  return *p;
}

}  // namespace

AerCostTables aer_cost_tables(const MarginalCountMatrix& q, const AlignmentPotentials& psi) {
  const int n = q.length();
  if (psi.length() != n) throw InvalidInput("AER: marginal/potential length mismatch");
  Eigen::MatrixXd W(n, n);
  Eigen::VectorXd W0(n);
  for (int a = 1; a <= n; ++a) {
    W0[a - 1] = 1.0 / a;
    for (int k = 1; k <= n; ++k) W(a - 1, k - 1) = 1.0 / (a + k);
  }
  const Eigen::MatrixXd QW = q.entries * W;
  AerCostTables f;
  f.fS = 2.0 * QW - psi.psiS * Eigen::RowVectorXd::Ones(n);
  f.fR = QW - psi.psiR * Eigen::RowVectorXd::Ones(n);
  f.f0 = q.entries * W0 - psi.psiR;
  return f;
}

BestResponse aermax_adversary_br(const MixedStrategy& predictorMix, const AlignmentPotentials& psi) {
  const int n = psi.length();
  if (static_cast<int>(predictorMix.length()) != n) throw InvalidInput("AerMax: mix/potential length mismatch");
  const MarginalCountMatrix q = marginal_count_matrix(predictorMix, pred::A);
  const AerCostTables f = aer_cost_tables(q, psi);

  // k = 0: no S tags; P wherever it pays. An all-N prediction scores 1
  // against any S-free gold, hence the empty-mass term.
  LabelSequence best(static_cast<std::size_t>(n), adv::N);
  double bestValue = q.emptyMass;
  for (int i = 0; i < n; ++i)
    if (f.f0[i] < 0.0) {
      best[static_cast<std::size_t>(i)] = adv::P;
      bestValue += f.f0[i];
    }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::vector<double> delta(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    for (int i = 0; i < n; ++i)
      delta[static_cast<std::size_t>(i)] = f.fS(i, k - 1) - std::min(f.fR(i, k - 1), 0.0);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return delta[static_cast<std::size_t>(a)] < delta[static_cast<std::size_t>(b)]; });
    LabelSequence seq(static_cast<std::size_t>(n), adv::N);
    double value = 0.0;
    for (int j = 0; j < n; ++j) {
      const int i = order[static_cast<std::size_t>(j)];
      if (j < k) {
        seq[static_cast<std::size_t>(i)] = adv::S;
        value += f.fS(i, k - 1);
      } else if (f.fR(i, k - 1) < 0.0) {
        seq[static_cast<std::size_t>(i)] = adv::P;
        value += f.fR(i, k - 1);
      }
    }
    if (value < bestValue) {
      bestValue = value;
      best = std::move(seq);
    }
  }
  return {std::move(best), bestValue};
}

Eigen::MatrixXd aer_predictor_gains(const MixedStrategy& adversaryMix) {
  const int n = static_cast<int>(adversaryMix.length());
  // joint(i, k) = P(#S == k and position i tagged ...), k = 0..n.
  const Eigen::MatrixXd sureJoint = joint_count_marginals(adversaryMix, adv::S, adv::S);
  const Eigen::MatrixXd possibleJoint = joint_count_marginals(adversaryMix, adv::S, adv::P);
  // Q_S column k-1 <-> S count k. Q_P column k-1 <-> S count k-1, which
  // pairs with the 1/(a+k-1) weights: a P-only position never raises |S|.
  const Eigen::MatrixXd QS = sureJoint.rightCols(n);
  const Eigen::MatrixXd QP = possibleJoint.leftCols(n);
  Eigen::MatrixXd WS(n, n), WP(n, n);
  for (int k = 1; k <= n; ++k)
    for (int a = 1; a <= n; ++a) {
      WS(k - 1, a - 1) = 2.0 / (a + k);
      WP(k - 1, a - 1) = 1.0 / (a + k - 1);
    }
  return QS * WS + QP * WP;
}

BestResponse aer_predictor_br(const MixedStrategy& adversaryMix) {
  const int n = static_cast<int>(adversaryMix.length());
  const Eigen::MatrixXd F = aer_predictor_gains(adversaryMix);

  // Predicting nothing scores 1 exactly against S-free adversary sequences.
  double bestValue = adversaryMix.expect([](const LabelSequence& y) { return y.count(adv::S) == 0 ? 1.0 : 0.0; });
  std::vector<int> bestPositions;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int a = 1; a <= n; ++a) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return F(x, a - 1) > F(y, a - 1); });
    double value = 0.0;
    for (int j = 0; j < a; ++j) value += F(order[static_cast<std::size_t>(j)], a - 1);
    if (value > bestValue) {
      bestValue = value;
      bestPositions.assign(order.begin(), order.begin() + a);
    }
  }
  LabelSequence seq(static_cast<std::size_t>(n), pred::N);
  for (int pos : bestPositions) seq[static_cast<std::size_t>(pos)] = pred::A;
  return {std::move(seq), bestValue};
}

BestResponse AerOracle::predictor_br(const MixedStrategy& adversary, const PotentialTable& psi) const {
  const AlignmentPotentials& p = alignment_psi(psi);
  BestResponse br = aer_predictor_br(adversary);
  br.value -= adversary.expect([&](const LabelSequence& a) { return lagrangian(a, p); });
  return br;
}

BestResponse AerOracle::adversary_br(const MixedStrategy& predictor, const PotentialTable& psi) const {
  return aermax_adversary_br(predictor, alignment_psi(psi));
}

}  // namespace mpg
