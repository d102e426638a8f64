#include "mpg/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mpg/parallel.hpp"

namespace mpg {

std::string_view task_name(TaskKind t) {
  switch (t) {
    case TaskKind::ChainF1:
      return "chain-f1";
    case TaskKind::AlignAer:
      return "align-aer";
    case TaskKind::AlignBipartite:
      return "align-bipartite";
  }
  return "";
}

TaskKind parse_task(std::string_view name) {
  for (TaskKind t : {TaskKind::ChainF1, TaskKind::AlignAer, TaskKind::AlignBipartite})
    if (task_name(t) == name) return t;
  throw InvalidInput("unknown task '" + std::string(name) + "' (chain-f1, align-aer, align-bipartite)");
}

std::string_view optimizer_name(Optimizer o) {
  return o == Optimizer::AdaDelta ? "adadelta" : "sgd-decay";
}

Optimizer parse_optimizer(std::string_view name) {
  if (name == "adadelta") return Optimizer::AdaDelta;
  if (name == "sgd-decay") return Optimizer::SgdDecay;
  throw InvalidInput("unknown optimizer '" + std::string(name) + "' (adadelta, sgd-decay)");
}

void TrainConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be finite and >= 0");
  if (epochs < 1) throw InvalidInput("epochs must be positive");
  if (!(learningRate > 0.0)) throw InvalidInput("learning rate must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidInput("rho must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  if (!(doubleOracleTol > 0.0)) throw InvalidInput("double-oracle tolerance must be positive");
  if (maxIterations < 1) throw InvalidInput("max iterations must be positive");
  if (jobs < 1) throw InvalidInput("jobs must be positive");
}

ScoreKind TrainingProblem::score(std::size_t k) const {
  switch (task) {
    case TaskKind::ChainF1:
      return ScoreKind::f1(target, static_cast<int>(classes.size()));
    case TaskKind::AlignAer:
      return ScoreKind::aer();
    case TaskKind::AlignBipartite:
      return ScoreKind::bipartite(cost, grids[k]);
  }
  return {};
}

Tag TrainingProblem::predictor_none() const {
  return task == TaskKind::ChainF1 ? filler_class(target) : pred::N;
}

TrainingProblem make_chain_problem(const std::vector<ChainExample>& data, const TagAlphabet& classes, Tag target,
                                   TemplateSet templates) {
  if (data.empty()) throw InvalidInput("training data is empty");
  if (classes.size() < 2) throw InvalidInput("chain tasks need at least two classes");
  if (target < 0 || target >= classes.size()) throw InvalidInput("target class out of range");
  TrainingProblem p;
  p.task = TaskKind::ChainF1;
  p.templates = templates;
  p.classes = classes.names();
  p.target = target;
  for (const ChainExample& ex : data) {
    p.inputs.emplace_back(register_chain(ex.tokens, classes, templates, p.index));
    p.gold.push_back(encode_tags(ex, classes));
    p.weight.push_back(1.0);
  }
  return p;
}

TrainingProblem make_alignment_problem(const std::vector<AlignmentExample>& data, TaskKind task,
                                       const CostFunction& cost) {
  if (data.empty()) throw InvalidInput("training data is empty");
  if (task == TaskKind::ChainF1) throw InvalidInput("alignment data given for a chain task");
  TrainingProblem p;
  p.task = task;
  p.templates = TemplateSet::AlignBasic;
  p.cost = cost;
  for (const AlignmentExample& ex : data) {
    p.inputs.emplace_back(register_alignment(ex.input, p.index));
    p.gold.push_back(ex.gold);
    p.grids.push_back({static_cast<int>(ex.input.source.size()), static_cast<int>(ex.input.target.size())});
    p.weight.push_back(1.0);
  }
  return p;
}

namespace {

// Beyond this many strategies a warm start keeps only the equilibrium
// supports, bounding the restricted LP size across epochs.
constexpr std::size_t kWarmSetCap = 64;

}  // namespace

ExampleResult example_subgradient(const Eigen::VectorXd& theta, const TrainingProblem& problem, std::size_t k,
                                  const TrainConfig& cfg, WarmStart* warm) {
  const CompiledExample& x = problem.inputs[k];
  const LabelSequence& gold = problem.gold[k];
  const ScoreKind kind = problem.score(k);
  const auto oracle = make_oracle(kind, cfg.brMode);

  OracleGameConfig game{kind, potentials(theta, x), cfg.doubleOracleTol, cfg.maxIterations, 1e-9, {}, {}};
  if (warm && !warm->predictor.empty() && !warm->adversary.empty()) {
    game.initialPredictor = warm->predictor;
    game.initialAdversary = warm->adversary;
  } else if (kind.kind == ScoreKindTag::Bipartite && !kind.grid.feasible(gold, adv::N)) {
    // A many-to-many gold is outside the adversary's strategy space.
    seed_without_gold(game, gold.size(), problem.predictor_none(), *oracle);
  } else {
    seed_from_gold(game, gold, *oracle);
  }

  GameSolution sol = run_double_oracle(game, *oracle);
  if (warm) {
    if (sol.predictorSet.size() + sol.adversarySet.size() > kWarmSetCap) {
      warm->predictor = sol.predictor.support();
      warm->adversary = sol.adversary.support();
    } else {
      warm->predictor = sol.predictorSet;
      warm->adversary = sol.adversarySet;
    }
  }

  Eigen::VectorXd direction = global_dense(x, gold, theta.size());
  const double objective = theta.dot(direction) + sol.value;
  for (std::size_t s = 0; s < sol.adversary.size(); ++s)
    accumulate_features(x, sol.adversary.sequence(s), -sol.adversary.prob(s), direction);
  return {std::move(direction), objective, std::move(sol)};
}

namespace {

class Stepper {
 public:
  Stepper(const TrainConfig& cfg, Eigen::Index dim)
      : cfg_(cfg), g2_(Eigen::VectorXd::Zero(dim)), dx2_(Eigen::VectorXd::Zero(dim)) {}

  // Ascent step along d.
  void apply(Eigen::VectorXd& theta, const Eigen::VectorXd& d) {
    if (cfg_.optimizer == Optimizer::SgdDecay) {
      theta += cfg_.learningRate / std::sqrt(1.0 + static_cast<double>(step_)) * d;
    } else {
      const double rho = cfg_.rho, eps = cfg_.epsilon;
      g2_ = rho * g2_ + (1.0 - rho) * d.cwiseAbs2();
      const Eigen::VectorXd dx =
          ((dx2_.array() + eps).sqrt() / (g2_.array() + eps).sqrt() * d.array()).matrix();
      dx2_ = rho * dx2_ + (1.0 - rho) * dx.cwiseAbs2();
      theta += dx;
    }
    ++step_;
  }

 private:
  const TrainConfig& cfg_;
  Eigen::VectorXd g2_;
  Eigen::VectorXd dx2_;
  long step_ = 0;
};

double total_weight(const TrainingProblem& problem) {
  const double w = std::accumulate(problem.weight.begin(), problem.weight.end(), 0.0);
  if (!(w > 0.0)) throw InvalidInput("example weights must sum to a positive value");
  return w;
}

}  // namespace

TrainedModel train(const TrainingProblem& problem, const TrainConfig& cfg, const EpochCallback& onEpoch) {
  cfg.validate();
  if (problem.size() == 0) throw InvalidInput("training data is empty");
  const std::size_t N = problem.size();
  const double W = total_weight(problem);
  const Eigen::Index dim = problem.index.size();

  TrainedModel model;
  model.task = problem.task;
  model.templates = problem.templates;
  model.classes = problem.classes;
  model.target = problem.target;
  model.cost = problem.cost;
  model.weights.index = problem.index;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);

  Stepper stepper(cfg, dim);
  std::vector<WarmStart> warm(N);
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);
  Eigen::VectorXd best;
  double bestObjective = -std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double objective = 0.0;
    if (cfg.fullBatch) {
      std::vector<Eigen::VectorXd> dirs(N);
      std::vector<double> objs(N);
      std::vector<char> flagged(N, 0);
      parallel_for(N, cfg.jobs, [&](std::size_t k) {
        ExampleResult r = example_subgradient(theta, problem, k, cfg, cfg.warmStart ? &warm[k] : nullptr);
        dirs[k] = std::move(r.direction);
        objs[k] = r.objective;
        flagged[k] = !r.solution.certified;
      });
      Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
      for (std::size_t k = 0; k < N; ++k) {
        d += problem.weight[k] / W * dirs[k];
        objective += problem.weight[k] / W * objs[k];
        if (flagged[k] && cfg.brMode == BrMode::Exact) ++model.uncertified;
      }
      objective -= 0.5 * cfg.lambda * theta.squaredNorm();
      if (cfg.keepBest && objective > bestObjective) {
        bestObjective = objective;
        best = theta;
      }
      stepper.apply(theta, d - cfg.lambda * theta);
    } else {
      for (std::size_t i = N; i > 1; --i) std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(static_cast<int>(i)))]);
      for (std::size_t k : order) {
        ExampleResult r = example_subgradient(theta, problem, k, cfg, cfg.warmStart ? &warm[k] : nullptr);
        if (!r.solution.certified && cfg.brMode == BrMode::Exact) ++model.uncertified;
        const double share = problem.weight[k] / W;
        objective += share * r.objective - share * 0.5 * cfg.lambda * theta.squaredNorm();
        stepper.apply(theta, share * static_cast<double>(N) * r.direction - cfg.lambda * theta);
      }
    }
    if (!std::isfinite(objective) || !theta.allFinite())
      throw std::runtime_error("training diverged in epoch " + std::to_string(epoch) + ": objective is not finite");
    model.trace.push_back(objective);
    model.epochs = epoch;
    model.objective = objective;
    if (onEpoch) onEpoch(epoch, objective);
  }
  if (cfg.keepBest && cfg.fullBatch) {
    model.objective = bestObjective;
    theta = std::move(best);
  }
  model.weights.theta = std::move(theta);
  return model;
}

double regularized_objective(const Eigen::VectorXd& theta, const TrainingProblem& problem, const TrainConfig& cfg) {
  const double W = total_weight(problem);
  std::vector<double> objs(problem.size());
  parallel_for(problem.size(), cfg.jobs,
               [&](std::size_t k) { objs[k] = example_subgradient(theta, problem, k, cfg).objective; });
  double acc = 0.0;
  for (std::size_t k = 0; k < problem.size(); ++k) acc += problem.weight[k] / W * objs[k];
  return acc - 0.5 * cfg.lambda * theta.squaredNorm();
}

namespace {

constexpr double kPredictTol = 1e-6;

GameSolution solve_prediction_game(const TrainedModel& model, const CompiledExample& x, const ScoreKind& kind) {
  const auto oracle = make_oracle(kind, BrMode::Exact);
  OracleGameConfig game{kind, potentials(model.weights.theta, x), kPredictTol, 500, 1e-9, {}, {}};
  const std::size_t n = std::holds_alternative<CompiledChain>(x) ? static_cast<std::size_t>(std::get<CompiledChain>(x).n)
                                                                 : static_cast<std::size_t>(std::get<CompiledAlignment>(x).n);
  const Tag none = kind.kind == ScoreKindTag::F1 ? filler_class(kind.target) : pred::N;
  seed_without_gold(game, n, none, *oracle);
  return run_double_oracle(game, *oracle);
}

}  // namespace

LabelSequence predict(const TrainedModel& model, const CompiledExample& x, const ScoreKind& kind) {
  const GameSolution sol = solve_prediction_game(model, x, kind);
  const auto oracle = make_oracle(kind, BrMode::Exact);
  const BestResponse br = oracle->predictor_br(sol.adversary, potentials(model.weights.theta, x));
  // Ties: the predictor's equilibrium support is all best responses to the
  // adversary mix (up to the solve gap), and the oracle's own tie-break
  // knows nothing of equilibrium weights. Take the heaviest support sequence
  // that still matches the best-response score; the potential term is the
  // same for every predictor sequence and cancels.
  const double brScore = sol.adversary.expect([&](const LabelSequence& a) { return score(kind, br.seq, a); });
  std::vector<std::size_t> order(sol.predictor.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sol.predictor.prob(a) > sol.predictor.prob(b); });
  for (std::size_t i : order) {
    const LabelSequence& y = sol.predictor.sequence(i);
    if (sol.adversary.expect([&](const LabelSequence& a) { return score(kind, y, a); }) >= brScore - 2 * kPredictTol - 1e-9)
      return y;
  }
  return br.seq;
}

MixedStrategy predict_mixture(const TrainedModel& model, const CompiledExample& x, const ScoreKind& kind) {
  return solve_prediction_game(model, x, kind).predictor;
}

TagAlphabet model_classes(const TrainedModel& model) {
  if (model.task != TaskKind::ChainF1) throw InvalidInput("alignment models have no class alphabet");
  return TagAlphabet::chain(model.classes);
}

LabelSequence predict_chain(const TrainedModel& model, const std::vector<std::string>& tokens) {
  const TagAlphabet classes = model_classes(model);
  const CompiledExample x = compile_chain(tokens, classes, model.templates, model.weights.index);
  return predict(model, x, ScoreKind::f1(model.target, classes.size()));
}

LabelSequence predict_alignment(const TrainedModel& model, const AlignmentInput& input) {
  if (model.task == TaskKind::ChainF1) throw InvalidInput("chain model given alignment input");
  const CompiledExample x = compile_alignment(input, model.weights.index);
  const MatchingConstraint grid{static_cast<int>(input.source.size()), static_cast<int>(input.target.size())};
  const ScoreKind kind = model.task == TaskKind::AlignAer ? ScoreKind::aer() : ScoreKind::bipartite(model.cost, grid);
  return predict(model, x, kind);
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(v)) throw InvalidInput("model file: bad number for " + what + ": '" + s + "'");
  return v;
}

}  // namespace

void save_model(std::ostream& out, const TrainedModel& model) {
  out << "mpgame-model 1\n";
  out << "classes";
  for (const std::string& c : model.classes) out << ' ' << c;
  out << "\ncost";
  for (const auto& row : model.cost.table)
    for (double v : row) out << ' ' << fmt(v);
  out << "\nepochs " << model.epochs << '\n';
  out << "objective " << fmt(model.objective) << '\n';
  out << "target " << (model.task == TaskKind::ChainF1 ? model.classes.at(static_cast<std::size_t>(model.target)) : "-")
      << '\n';
  out << "task " << task_name(model.task) << '\n';
  out << "templates " << template_name(model.templates) << ' ' << kTemplateVersion << '\n';

  std::vector<Eigen::Index> slots(static_cast<std::size_t>(model.weights.index.size()));
  std::iota(slots.begin(), slots.end(), Eigen::Index{0});
  std::sort(slots.begin(), slots.end(),
            [&](Eigen::Index a, Eigen::Index b) { return model.weights.index.name(a) < model.weights.index.name(b); });
  out << "weights " << slots.size() << '\n';
  for (Eigen::Index s : slots) {
    const double w = s < model.weights.theta.size() ? model.weights.theta[s] : 0.0;
    out << model.weights.index.name(s) << '\t' << fmt(w) << '\n';
  }
}

TrainedModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "mpgame-model 1") throw InvalidInput("model file: missing 'mpgame-model 1' header");
  TrainedModel model;
  std::string targetName;
  auto expect = [&](const std::string& key) {
    if (!std::getline(in, line)) throw InvalidInput("model file: missing '" + key + "' line");
    std::istringstream ss(line);
    std::string k;
    ss >> k;
    if (k != key) throw InvalidInput("model file: expected '" + key + "', found '" + line + "'");
    std::vector<std::string> rest;
    for (std::string w; ss >> w;) rest.push_back(w);
    return rest;
  };
  model.classes = expect("classes");
  const auto cost = expect("cost");
  if (cost.size() != 6) throw InvalidInput("model file: cost needs 6 entries");
  for (std::size_t i = 0; i < 6; ++i) model.cost.table[i / 3][i % 3] = parse_double(cost[i], "cost");
  const auto epochs = expect("epochs");
  if (epochs.size() != 1) throw InvalidInput("model file: bad epochs line");
  model.epochs = static_cast<int>(parse_double(epochs[0], "epochs"));
  const auto objective = expect("objective");
  if (objective.size() != 1) throw InvalidInput("model file: bad objective line");
  model.objective = parse_double(objective[0], "objective");
  const auto target = expect("target");
  if (target.size() != 1) throw InvalidInput("model file: bad target line");
  targetName = target[0];
  const auto task = expect("task");
  if (task.size() != 1) throw InvalidInput("model file: bad task line");
  model.task = parse_task(task[0]);
  const auto templates = expect("templates");
  if (templates.size() != 2) throw InvalidInput("model file: bad templates line");
  model.templates = parse_template_set(templates[0]);
  if (templates[1] != std::to_string(kTemplateVersion))
    throw InvalidInput("model file: template version " + templates[1] + " is not supported");
  if (model.task == TaskKind::ChainF1) {
    const TagAlphabet classes = TagAlphabet::chain(model.classes);
    model.target = classes.index(targetName);
  }
  const auto weights = expect("weights");
  if (weights.size() != 1) throw InvalidInput("model file: bad weights line");
  const auto count = static_cast<long>(parse_double(weights[0], "weights"));
  std::vector<double> theta;
  for (long k = 0; k < count; ++k) {
    if (!std::getline(in, line)) throw InvalidInput("model file: truncated weight list");
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw InvalidInput("model file: weight line without a tab: '" + line + "'");
    if (model.weights.index.intern(line.substr(0, tab)) != static_cast<Eigen::Index>(theta.size()))
      throw InvalidInput("model file: duplicate feature '" + line.substr(0, tab) + "'");
    theta.push_back(parse_double(line.substr(tab + 1), "weight"));
  }
  model.weights.theta = Eigen::Map<Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  return model;
}

}  // namespace mpg
