#pragma once

// Best responses for the 1 - AER game over alignment grids flattened
// row-major into sequences.

#include <Eigen/Core>

#include "mpg/core.hpp"
#include "mpg/game.hpp"

namespace mpg {

/// Adversary-side cost tables built from the predictor's A-tag marginals q.
///   fS(i, k-1) = 2 sum_a q(i,a)/(a+k) - psiS(i)
///   fR(i, k-1) =   sum_a q(i,a)/(a+k) - psiR(i)
///   f0(i)      =   sum_a q(i,a)/a     - psiR(i)
struct AerCostTables {
  Eigen::MatrixXd fS;
  Eigen::MatrixXd fR;
  Eigen::VectorXd f0;
};

AerCostTables aer_cost_tables(const MarginalCountMatrix& q, const AlignmentPotentials& psi);

/// argmin over {N,P,S}^n of E[1 - AER] - psi, one sorted selection per S count.
BestResponse aermax_adversary_br(const MixedStrategy& predictorMix, const AlignmentPotentials& psi);

/// argmax over {N,A}^n of E[1 - AER] (psi is constant in the prediction).
BestResponse aer_predictor_br(const MixedStrategy& adversaryMix);

/// Gain matrix F' = Q_S W_S + Q_P W_P used by aer_predictor_br: column a-1
/// holds each position's expected gain when exactly a links are predicted.
Eigen::MatrixXd aer_predictor_gains(const MixedStrategy& adversaryMix);

class AerOracle : public BestResponseOracle {
 public:
  BestResponse predictor_br(const MixedStrategy& adversary, const PotentialTable& psi) const override;
  BestResponse adversary_br(const MixedStrategy& predictor, const PotentialTable& psi) const override;
};

}  // namespace mpg
