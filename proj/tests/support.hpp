#pragma once

// Test-side reference code. Nothing here calls the library's scoring,
// enumeration or solver paths; the fast implementations are checked
// against these.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mpg/core.hpp"
#include "mpg/game.hpp"

namespace mpgtest {

using mpg::LabelSequence;
using mpg::MixedStrategy;
using mpg::Tag;

#ifndef MPG_FIXTURES
#define MPG_FIXTURES "tests/fixtures"
#endif

inline std::string fixture(const std::string& name) { return std::string(MPG_FIXTURES) + "/" + name; }

// The n = 2 AER game, transcribed as published: rows are gold sequences
// NN NP NS PN PP PS SN SP SS, columns predictions NN NA AN AA, entries
// 1 - AER.
inline const double kPublishedScore[9][4] = {
    {1, 0, 0, 0},         {1, 1, 0, 1.0 / 2},       {0, 1, 0, 2.0 / 3},
    {1, 0, 1, 1.0 / 2},   {1, 1, 1, 1},             {0, 1, 1.0 / 2, 1},
    {0, 0, 1, 2.0 / 3},   {0, 1.0 / 2, 1, 1},       {0, 2.0 / 3, 2.0 / 3, 1},
};

struct Gen {
  std::mt19937_64 engine;
  explicit Gen(std::uint64_t seed) : engine(seed) {}
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
  bool coin(double p) { return real(0.0, 1.0) < p; }
};

/// Every sequence in {0..k-1}^n, lexicographic.
inline std::vector<LabelSequence> all_sequences(std::size_t n, int k) {
  std::vector<LabelSequence> out;
  LabelSequence s(n, 0);
  for (;;) {
    out.push_back(s);
    std::size_t i = n;
    while (i > 0 && s[i - 1] == k - 1) s[--i] = 0;
    if (i == 0) break;
    ++s[i - 1];
  }
  return out;
}

inline double ref_f1(const LabelSequence& pred, const LabelSequence& gold, Tag c) {
  int both = 0, p = 0, g = 0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    p += pred[t] == c;
    g += gold[t] == c;
    both += pred[t] == c && gold[t] == c;
  }
  return p + g == 0 ? 1.0 : 2.0 * both / (p + g);
}

// AER from its textbook form: 1 - (|A&S| + |A&P|) / (|A| + |S|), with S a
// subset of P.
inline double ref_aer(const LabelSequence& pred, const LabelSequence& gold) {
  int as = 0, ap = 0, a = 0, s = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool isA = pred[i] == mpg::pred::A;
    const bool isS = gold[i] == mpg::adv::S;
    const bool isP = isS || gold[i] == mpg::adv::P;
    a += isA;
    s += isS;
    as += isA && isS;
    ap += isA && isP;
  }
  return a + s == 0 ? 0.0 : 1.0 - double(as + ap) / (a + s);
}

inline double ref_psi(const LabelSequence& y, const mpg::ChainPotentials& psi) {
  double acc = 0.0;
  Tag prev = psi.start();
  for (std::size_t t = 0; t < y.size(); ++t) {
    acc += psi.unigram(static_cast<Eigen::Index>(t), y[t]);
    acc += psi.transition[t](prev, y[t]);
    prev = y[t];
  }
  return acc;
}

inline double ref_psi(const LabelSequence& y, const mpg::AlignmentPotentials& psi) {
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == mpg::adv::S) acc += psi.psiS[static_cast<Eigen::Index>(i)];
    if (y[i] == mpg::adv::P) acc += psi.psiR[static_cast<Eigen::Index>(i)];
  }
  return acc;
}

inline double ref_psi(const LabelSequence& y, const mpg::PotentialTable& psi) {
  return std::visit([&](const auto& p) { return ref_psi(y, p); }, psi);
}

inline bool ref_feasible(const LabelSequence& y, int rows, int cols, Tag none) {
  for (int i = 0; i < rows; ++i) {
    int used = 0;
    for (int j = 0; j < cols; ++j) used += y[static_cast<std::size_t>(i * cols + j)] != none;
    if (used > 1) return false;
  }
  for (int j = 0; j < cols; ++j) {
    int used = 0;
    for (int i = 0; i < rows; ++i) used += y[static_cast<std::size_t>(i * cols + j)] != none;
    if (used > 1) return false;
  }
  return true;
}

inline double ref_score(const mpg::ScoreKind& kind, const LabelSequence& pred, const LabelSequence& adv) {
  switch (kind.kind) {
    case mpg::ScoreKindTag::F1:
      return ref_f1(pred, adv, kind.target);
    case mpg::ScoreKindTag::Aer:
      return 1.0 - ref_aer(pred, adv);
    case mpg::ScoreKindTag::Bipartite: {
      double acc = 0.0;
      for (std::size_t i = 0; i < pred.size(); ++i) acc += 1.0 - kind.cost.table[pred[i]][adv[i]];
      return acc;
    }
  }
  return 0.0;
}

struct Space {
  std::vector<LabelSequence> predictor;
  std::vector<LabelSequence> adversary;
};

/// Pure strategies of both players. F1 predictors are target masks with
/// filler_class elsewhere; bipartite strategies obey the grid. Both lists
/// are in lexicographic order.
inline Space ref_space(const mpg::ScoreKind& kind, std::size_t n) {
  Space s;
  switch (kind.kind) {
    case mpg::ScoreKindTag::F1:
      for (LabelSequence m : all_sequences(n, 2)) {
        for (std::size_t t = 0; t < n; ++t) m[t] = m[t] ? kind.target : mpg::filler_class(kind.target);
        s.predictor.push_back(m);
      }
      s.adversary = all_sequences(n, kind.classes);
      break;
    case mpg::ScoreKindTag::Aer:
      s.predictor = all_sequences(n, 2);
      s.adversary = all_sequences(n, 3);
      break;
    case mpg::ScoreKindTag::Bipartite: {
      // Row by row: each source takes an unused target column or nothing.
      const int R = kind.grid.sourceCount, C = kind.grid.targetCount;
      std::vector<bool> used(static_cast<std::size_t>(C), false);
      LabelSequence y(n, 0);
      std::function<void(int, const std::vector<Tag>&, std::vector<LabelSequence>&)> rec =
          [&](int r, const std::vector<Tag>& tags, std::vector<LabelSequence>& out) {
            if (r == R) {
              out.push_back(y);
              return;
            }
            rec(r + 1, tags, out);
            for (int c = 0; c < C; ++c) {
              if (used[static_cast<std::size_t>(c)]) continue;
              used[static_cast<std::size_t>(c)] = true;
              for (Tag t : tags) {
                y[static_cast<std::size_t>(r * C + c)] = t;
                rec(r + 1, tags, out);
              }
              y[static_cast<std::size_t>(r * C + c)] = 0;
              used[static_cast<std::size_t>(c)] = false;
            }
          };
      rec(0, {mpg::pred::A}, s.predictor);
      rec(0, {mpg::adv::P, mpg::adv::S}, s.adversary);
      break;
    }
  }
  std::sort(s.predictor.begin(), s.predictor.end());
  std::sort(s.adversary.begin(), s.adversary.end());
  return s;
}

/// Payoff score - psi(adv) for every pair, rows predictor.
inline Eigen::MatrixXd ref_matrix(const mpg::ScoreKind& kind, const mpg::PotentialTable& psi, const Space& s) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(s.predictor.size()), static_cast<Eigen::Index>(s.adversary.size()));
  for (std::size_t r = 0; r < s.predictor.size(); ++r)
    for (std::size_t c = 0; c < s.adversary.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          ref_score(kind, s.predictor[r], s.adversary[c]) - ref_psi(s.adversary[c], psi);
  return m;
}

inline double ref_vs_adversary(const mpg::ScoreKind& kind, const mpg::PotentialTable& psi, const LabelSequence& pred,
                               const MixedStrategy& adv) {
  double acc = 0.0;
  for (std::size_t i = 0; i < adv.size(); ++i)
    acc += adv.prob(i) * (ref_score(kind, pred, adv.sequence(i)) - ref_psi(adv.sequence(i), psi));
  return acc;
}

inline double ref_vs_predictor(const mpg::ScoreKind& kind, const mpg::PotentialTable& psi, const MixedStrategy& pred,
                               const LabelSequence& adv) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += pred.prob(i) * ref_score(kind, pred.sequence(i), adv);
  return acc - ref_psi(adv, psi);
}

inline double brute_predictor_value(const mpg::ScoreKind& kind, const mpg::PotentialTable& psi,
                                    const MixedStrategy& adv) {
  double best = -std::numeric_limits<double>::infinity();
  for (const LabelSequence& y : ref_space(kind, adv.length()).predictor)
    best = std::max(best, ref_vs_adversary(kind, psi, y, adv));
  return best;
}

inline double brute_adversary_value(const mpg::ScoreKind& kind, const mpg::PotentialTable& psi,
                                    const MixedStrategy& pred) {
  double best = std::numeric_limits<double>::infinity();
  for (const LabelSequence& y : ref_space(kind, pred.length()).adversary)
    best = std::min(best, ref_vs_predictor(kind, psi, pred, y));
  return best;
}

/// Up to maxSupport distinct sequences from `draw`, random weights.
inline MixedStrategy random_mix(Gen& g, int maxSupport, const std::function<LabelSequence()>& draw) {
  std::vector<LabelSequence> support;
  const int want = g.integer(1, maxSupport);
  for (int tries = 0; static_cast<int>(support.size()) < want && tries < 8 * want; ++tries) {
    LabelSequence s = draw();
    if (std::find(support.begin(), support.end(), s) == support.end()) support.push_back(s);
  }
  Eigen::VectorXd p(static_cast<Eigen::Index>(support.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = g.real(0.05, 1.0);
  p /= p.sum();
  return MixedStrategy(std::move(support), p);
}

/// With probability `allFill` the whole sequence is `fill`, so the
/// zero-count branches get exercised.
inline LabelSequence random_sequence(Gen& g, std::size_t n, int k, Tag fill = 0, double allFill = 0.0) {
  if (g.coin(allFill)) return LabelSequence(n, fill);
  LabelSequence s(n, 0);
  for (std::size_t i = 0; i < n; ++i) s[i] = g.integer(0, k - 1);
  return s;
}

inline LabelSequence random_mask(Gen& g, std::size_t n, Tag target, double allFill = 0.15) {
  LabelSequence s = random_sequence(g, n, 2, 0, allFill);
  for (std::size_t i = 0; i < n; ++i) s[i] = s[i] ? target : mpg::filler_class(target);
  return s;
}

inline LabelSequence random_matching(Gen& g, int rows, int cols, const std::vector<Tag>& tags) {
  std::vector<int> perm(static_cast<std::size_t>(std::max(rows, cols)));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::shuffle(perm.begin(), perm.end(), g.engine);
  LabelSequence y(static_cast<std::size_t>(rows * cols), 0);
  for (int i = 0; i < rows; ++i)
    if (perm[static_cast<std::size_t>(i)] < cols && g.coin(0.6))
      y[static_cast<std::size_t>(i * cols + perm[static_cast<std::size_t>(i)])] =
          tags[static_cast<std::size_t>(g.integer(0, static_cast<int>(tags.size()) - 1))];
  return y;
}

inline mpg::ChainPotentials random_chain_psi(Gen& g, int n, int m, double scale) {
  mpg::ChainPotentials p = mpg::ChainPotentials::zeros(n, m);
  for (int t = 0; t < n; ++t)
    for (int c = 0; c < m; ++c) p.unigram(t, c) = g.real(-scale, scale);
  for (int t = 0; t < n; ++t)
    for (int a = 0; a <= m; ++a)
      for (int c = 0; c < m; ++c)
        if (t == 0 ? a == m : a < m) p.transition[static_cast<std::size_t>(t)](a, c) = g.real(-scale, scale);
  return p;
}

inline mpg::AlignmentPotentials random_align_psi(Gen& g, int n, double scale) {
  mpg::AlignmentPotentials p = mpg::AlignmentPotentials::zeros(n);
  for (int i = 0; i < n; ++i) {
    p.psiS[i] = g.real(-scale, scale);
    p.psiR[i] = g.real(-scale, scale);
  }
  return p;
}

/// Value of a small zero-sum game by support enumeration: some equilibrium
/// pair has equal-size square supports on which both players equalise.
inline double support_enumeration_value(const Eigen::MatrixXd& m) {
  const int R = static_cast<int>(m.rows()), C = static_cast<int>(m.cols());
  const double tol = 1e-9;
  auto subsets = [](int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(k));
    std::function<void(int, int)> rec = [&](int start, int depth) {
      if (depth == k) {
        out.push_back(cur);
        return;
      }
      for (int i = start; i < n; ++i) {
        cur[static_cast<std::size_t>(depth)] = i;
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);
    return out;
  };
  for (int k = 1; k <= std::min(R, C); ++k)
    for (const auto& rs : subsets(R, k))
      for (const auto& cs : subsets(C, k)) {
        // Unknowns: p (k entries) and v. p^T M[rs, cs] = v, sum p = 1.
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k + 1, k + 1);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k + 1, k + 1);
        for (int a = 0; a < k; ++a)
          for (int c = 0; c < k; ++c) {
            A(c, a) = m(rs[static_cast<std::size_t>(a)], cs[static_cast<std::size_t>(c)]);
            B(a, c) = m(rs[static_cast<std::size_t>(a)], cs[static_cast<std::size_t>(c)]);
          }
        for (int a = 0; a < k; ++a) {
          A(a, k) = -1.0;
          A(k, a) = 1.0;
          B(a, k) = -1.0;
          B(k, a) = 1.0;
        }
        b[k] = 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> luA(A), luB(B);
        if (!luA.isInvertible() || !luB.isInvertible()) continue;
        const Eigen::VectorXd xp = luA.solve(b), xq = luB.solve(b);
        if (xp.head(k).minCoeff() < -tol || xq.head(k).minCoeff() < -tol) continue;
        Eigen::VectorXd p = Eigen::VectorXd::Zero(R), q = Eigen::VectorXd::Zero(C);
        for (int a = 0; a < k; ++a) {
          p[rs[static_cast<std::size_t>(a)]] = xp[a];
          q[cs[static_cast<std::size_t>(a)]] = xq[a];
        }
        const double v = xp[k];
        if ((m.transpose() * p).minCoeff() >= v - 1e-7 && (m * q).maxCoeff() <= v + 1e-7) return v;
      }
  return std::numeric_limits<double>::quiet_NaN();
}

/// max c.x subject to A x <= b, x >= 0, with b >= 0. Dense tableau,
/// Bland's entering rule; small problems only.
inline double lp_maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index rows = A.rows(), n = A.cols();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(rows + 1, n + rows + 1);
  T.topLeftCorner(rows, n) = A;
  T.block(0, n, rows, rows).setIdentity();
  T.col(n + rows).head(rows) = b;
  T.row(rows).head(n) = -c.transpose();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) basis[static_cast<std::size_t>(r)] = n + r;
  for (long pivots = 0;; ++pivots) {
    // Largest-pivot ties forfeit Bland's cycling guarantee; NaN fails loudly.
    if (pivots > 100000) return std::numeric_limits<double>::quiet_NaN();
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + rows; ++j)
      if (T(rows, j) < -1e-12) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    // Minimum ratio, then among ratios within 1e-9 of it the largest pivot;
    // tiny pivots are what wreck a plain Bland tableau on degenerate games.
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < rows; ++r)
      if (T(r, enter) > 1e-9) best = std::min(best, T(r, n + rows) / T(r, enter));
    Eigen::Index leave = -1;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (T(r, enter) <= 1e-9 || T(r, n + rows) / T(r, enter) > best + 1e-9) continue;
      if (leave < 0 || T(r, enter) > T(leave, enter)) leave = r;
    }
    if (leave < 0) return std::numeric_limits<double>::infinity();
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index r = 0; r <= rows; ++r)
      if (r != leave) T.row(r) -= T(r, enter) * T.row(leave);
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  return T(rows, n + rows);
}

/// Game value through the LP max 1.y s.t. (M + s) y <= 1, y >= 0, whose
/// optimum is 1 / (v + s).
inline double lp_game_value(const Eigen::MatrixXd& m) {
  const double shift = std::max(0.0, 1.0 - m.minCoeff());
  const Eigen::MatrixXd shifted = (m.array() + shift).matrix();
  const double opt = lp_maximize(Eigen::VectorXd::Ones(m.cols()), shifted, Eigen::VectorXd::Ones(m.rows()));
  return 1.0 / opt - shift;
}

}  // namespace mpgtest
