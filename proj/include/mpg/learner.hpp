#pragma once

// Parameter estimation: each example's game is solved at psi = theta . Phi
// and the equilibrium adversary supplies the subgradient of
//   theta . Phi(gold) + value(theta),
// a concave function of theta that training maximises.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mpg/core.hpp"
#include "mpg/data_io.hpp"
#include "mpg/double_oracle.hpp"
#include "mpg/features.hpp"
#include "mpg/game.hpp"

namespace mpg {

enum class TaskKind { ChainF1, AlignAer, AlignBipartite };
std::string_view task_name(TaskKind t);
TaskKind parse_task(std::string_view name);

enum class Optimizer { AdaDelta, SgdDecay };
std::string_view optimizer_name(Optimizer o);
Optimizer parse_optimizer(std::string_view name);

struct TrainConfig {
  double lambda = 1e-3;
  Optimizer optimizer = Optimizer::AdaDelta;
  double learningRate = 0.1;  // sgd-decay: rate / sqrt(1 + step)
  double rho = 0.95;
  double epsilon = 1e-6;
  int epochs = 10;
  std::uint64_t seed = 1;
  BrMode brMode = BrMode::Exact;
  double doubleOracleTol = 1e-6;
  int maxIterations = 500;
  bool warmStart = true;
  // Full-batch steps on the mean subgradient instead of per-example steps.
  bool fullBatch = false;
  // Full batch only: return the best iterate seen instead of the last one.
  // Subgradient steps are not monotone, and the full-batch objective is
  // exact at each pre-step theta, so the choice is free.
  bool keepBest = false;
  int jobs = 1;

  void validate() const;
};

/// Compiled training data of one task.
struct TrainingProblem {
  TaskKind task = TaskKind::ChainF1;
  TemplateSet templates = TemplateSet::ChainBasic;
  std::vector<std::string> classes;  // chain tasks
  Tag target = 0;                    // ChainF1
  CostFunction cost;                 // AlignBipartite
  FeatureIndex index;
  std::vector<CompiledExample> inputs;
  std::vector<LabelSequence> gold;
  std::vector<MatchingConstraint> grids;  // alignment tasks
  std::vector<double> weight;             // per example, default 1

  std::size_t size() const { return inputs.size(); }
  ScoreKind score(std::size_t k) const;
  Tag predictor_none() const;
};

TrainingProblem make_chain_problem(const std::vector<ChainExample>& data, const TagAlphabet& classes, Tag target,
                                   TemplateSet templates);
TrainingProblem make_alignment_problem(const std::vector<AlignmentExample>& data, TaskKind task,
                                       const CostFunction& cost = {});

/// Strategy sets from an earlier solve, reused to seed the next one.
struct WarmStart {
  std::vector<LabelSequence> predictor;
  std::vector<LabelSequence> adversary;
};

struct ExampleResult {
  Eigen::VectorXd direction;  // Phi(gold) - E_adversary[Phi]
  double objective = 0.0;     // theta . Phi(gold) + game value
  GameSolution solution;
};

/// Solves example k's game by double oracle at theta. `warm` may be null;
/// when given it seeds the solve and receives the final sets.
ExampleResult example_subgradient(const Eigen::VectorXd& theta, const TrainingProblem& problem, std::size_t k,
                                  const TrainConfig& cfg, WarmStart* warm = nullptr);

struct TrainedModel {
  TaskKind task = TaskKind::ChainF1;
  TemplateSet templates = TemplateSet::ChainBasic;
  std::vector<std::string> classes;
  Tag target = 0;
  CostFunction cost;
  WeightVector weights;
  int epochs = 0;
  double objective = 0.0;
  // Regularised mean objective after each epoch (not serialised).
  std::vector<double> trace;
  long uncertified = 0;
};

/// Called after each epoch with (epoch, regularised objective).
using EpochCallback = std::function<void(int, double)>;

/// Throws std::runtime_error when the objective stops being finite.
TrainedModel train(const TrainingProblem& problem, const TrainConfig& cfg, const EpochCallback& onEpoch = {});

/// Regularised mean objective at theta, solved from scratch.
double regularized_objective(const Eigen::VectorXd& theta, const TrainingProblem& problem, const TrainConfig& cfg);

/// Exact-oracle game at theta, predictor's best response to the adversary
/// equilibrium. Among tied best responses the heaviest sequence in the
/// predictor's equilibrium mixture wins; the oracle's pick is the fallback.
LabelSequence predict(const TrainedModel& model, const CompiledExample& x, const ScoreKind& kind);
// The predictor's own equilibrium mixture from the same game. Under the
// data its expected score is at least the example objective at theta, which
// is what consistency arguments bound; predict() can land on a different
// equilibrium's best response when the adversary's equilibrium is not unique.
MixedStrategy predict_mixture(const TrainedModel& model, const CompiledExample& x, const ScoreKind& kind);
LabelSequence predict_chain(const TrainedModel& model, const std::vector<std::string>& tokens);
LabelSequence predict_alignment(const TrainedModel& model, const AlignmentInput& x);

/// Header line "mpgame-model 1", then sorted key lines, then one
/// "name<TAB>weight" line per feature in byte order of the names.
void save_model(std::ostream& out, const TrainedModel& model);
TrainedModel load_model(std::istream& in);

TagAlphabet model_classes(const TrainedModel& model);

}  // namespace mpg
