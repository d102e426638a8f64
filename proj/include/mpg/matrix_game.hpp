#pragma once

// Exact equilibria of finite two-player zero-sum games.
//
// Rows belong to the maximizing player, columns to the minimizer. The game
// is solved as the linear program
//
//   max  sum_c y_c   s.t.  (M + s) y <= 1,  y >= 0
//
// on the shifted matrix M + s (all entries >= 1). Its optimum is 1/(v + s)
// and the column mix is y normalised; the row mix is read off the dual
// values of the slack columns in the final tableau.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "mpg/core.hpp"

namespace mpg {

template <typename Scalar>
using PayoffMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using ProbVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct Equilibrium {
  ProbVector<Scalar> rowMix;
  ProbVector<Scalar> colMix;
  Scalar value{};
  // max row deviation gain + max column deviation gain over the matrix.
  Scalar gap{};
};

template <typename Scalar>
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, Equilibrium<Scalar> incumbent)
      : std::runtime_error(what), incumbent_(std::move(incumbent)) {}
  const Equilibrium<Scalar>& incumbent() const { return incumbent_; }

 private:
  Equilibrium<Scalar> incumbent_;
};

/// Argmax of the row player's expected payoff against `colMix`; ties go to
/// the lowest row.
template <typename Scalar>
std::pair<Eigen::Index, Scalar> best_pure_row(const PayoffMatrix<Scalar>& m, const ProbVector<Scalar>& colMix) {
  if (colMix.size() != m.cols()) throw InvalidInput("best_pure_row: mix dimension mismatch");
  const ProbVector<Scalar> payoff = m * colMix;
  Eigen::Index best = 0;
  for (Eigen::Index r = 1; r < payoff.size(); ++r)
    if (payoff[r] > payoff[best]) best = r;
  return {best, payoff[best]};
}

/// Argmin of the row player's expected payoff over columns, given `rowMix`.
template <typename Scalar>
std::pair<Eigen::Index, Scalar> best_pure_col(const PayoffMatrix<Scalar>& m, const ProbVector<Scalar>& rowMix) {
  if (rowMix.size() != m.rows()) throw InvalidInput("best_pure_col: mix dimension mismatch");
  const ProbVector<Scalar> payoff = m.transpose() * rowMix;
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < payoff.size(); ++c)
    if (payoff[c] < payoff[best]) best = c;
  return {best, payoff[best]};
}

template <typename Scalar>
Scalar deviation_gap(const PayoffMatrix<Scalar>& m, const ProbVector<Scalar>& rowMix,
                     const ProbVector<Scalar>& colMix) {
  return best_pure_row(m, colMix).second - best_pure_col(m, rowMix).second;
}

namespace detail {

template <typename Scalar>
ProbVector<Scalar> normalized(ProbVector<Scalar> v) {
  v = v.cwiseMax(Scalar(0));
  const Scalar s = v.sum();
  if (s > Scalar(0)) v /= s;
  else v.setConstant(Scalar(1) / static_cast<Scalar>(v.size()));
  return v;
}

}  // namespace detail

/// Solves the zero-sum game `m` by dense tableau simplex.
///
/// The returned gap is at most tol * max(1, max|m|) on success; otherwise
/// (or when the pivot cap is hit) SolverFailure carries the incumbent.
template <typename Scalar>
Equilibrium<Scalar> solve_zero_sum(const PayoffMatrix<Scalar>& m, Scalar tol = Scalar(1e-9)) {
  using std::abs;
  if (!(tol > Scalar(0))) throw InvalidInput("solve_zero_sum: tol must be positive");
  if (m.rows() < 1 || m.cols() < 1) throw InvalidInput("solve_zero_sum: empty payoff matrix");
  if (!m.allFinite()) throw InvalidInput("solve_zero_sum: non-finite payoff entry");

  const Eigen::Index R = m.rows(), C = m.cols();
  const Scalar shift = std::max(Scalar(0), Scalar(1) - m.minCoeff());
  const Scalar scale = std::max(Scalar(1), m.cwiseAbs().maxCoeff());
  const Scalar eps = std::max(std::numeric_limits<Scalar>::epsilon() * Scalar(64) * (scale + shift),
                              std::min(tol, Scalar(1e-9)) * Scalar(1e-3));

  // Tableau: R constraint rows plus the objective row. Columns: C structural
  // variables, R slacks, right-hand side.
  const Eigen::Index cols = C + R + 1;
  PayoffMatrix<Scalar> T = PayoffMatrix<Scalar>::Zero(R + 1, cols);
  T.topLeftCorner(R, C) = m.array() + shift;
  T.block(0, C, R, R).setIdentity();
  T.col(cols - 1).head(R).setOnes();
  T.row(R).head(C).setConstant(Scalar(-1));

  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1> basis(R);
  for (Eigen::Index r = 0; r < R; ++r) basis[r] = C + r;

  auto extract = [&]() {
    Equilibrium<Scalar> eq;
    ProbVector<Scalar> y = ProbVector<Scalar>::Zero(C);
    for (Eigen::Index r = 0; r < R; ++r)
      if (basis[r] < C) y[basis[r]] = T(r, cols - 1);
    ProbVector<Scalar> x = T.row(R).segment(C, R).transpose();
    const Scalar z = T(R, cols - 1);
    eq.colMix = detail::normalized<Scalar>(y);
    eq.rowMix = detail::normalized<Scalar>(x);
    eq.value = z > Scalar(0) ? Scalar(1) / z - shift : m.minCoeff();
    eq.gap = deviation_gap<Scalar>(m, eq.rowMix, eq.colMix);
    return eq;
  };

  const long maxPivots = 200L * static_cast<long>(R + C) + 1000L;
  // Dantzig pricing; a run of degenerate pivots switches to Bland's rule for
  // good, which cannot cycle.
  constexpr int kDegenerateRun = 50;
  const Scalar pivotTol = std::max(eps, Scalar(1e-9) * (scale + shift));
  int degenerate = 0;
  ProbVector<Scalar> pivotCol(R + 1);
  for (long pivots = 0;; ++pivots) {
    const bool bland = degenerate >= kDegenerateRun;
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < C + R; ++j)
      if (T(R, j) < -eps && (enter < 0 || (!bland && T(R, j) < T(R, enter)))) {
        enter = j;
        if (bland) break;
      }
    if (enter < 0) break;
    if (pivots >= maxPivots) throw SolverFailure<Scalar>("solve_zero_sum: pivot cap exceeded", extract());

    // Two-pass ratio test: bound the step with a slightly relaxed ratio,
    // then take the largest pivot element under that bound. Small pivots are
    // what loses accuracy on near-degenerate games.
    Scalar bound = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index r = 0; r < R; ++r)
      if (T(r, enter) > pivotTol) bound = std::min(bound, (T(r, cols - 1) + eps) / T(r, enter));
    Eigen::Index leave = -1;
    Scalar bestRatio = bound;
    for (Eigen::Index r = 0; r < R; ++r) {
      if (T(r, enter) <= pivotTol) continue;
      const Scalar ratio = T(r, cols - 1) / T(r, enter);
      if (ratio > bound) continue;
      if (leave < 0 || (bland ? basis[r] < basis[leave] : T(r, enter) > T(leave, enter))) leave = r;
    }
    if (leave >= 0) bestRatio = std::max(Scalar(0), T(leave, cols - 1) / T(leave, enter));
    // Unbounded cannot happen: every entry of the shifted matrix is >= 1.
    if (leave < 0) throw SolverFailure<Scalar>("solve_zero_sum: unbounded pivot column", extract());
    if (!bland) degenerate = bestRatio <= eps ? degenerate + 1 : 0;

    T.row(leave) /= T(leave, enter);
    pivotCol = T.col(enter);
    pivotCol[leave] = Scalar(0);
    T.noalias() -= pivotCol * T.row(leave);
    basis[leave] = enter;
  }

  Equilibrium<Scalar> eq = extract();
  // Report the value of the extracted mixes; it sits between the two
  // one-sided guarantees.
  eq.value = (best_pure_row<Scalar>(m, eq.colMix).second + best_pure_col<Scalar>(m, eq.rowMix).second) / Scalar(2);
  if (eq.gap > tol * scale) throw SolverFailure<Scalar>("solve_zero_sum: deviation gap above tolerance", eq);
  return eq;
}

}  // namespace mpg
