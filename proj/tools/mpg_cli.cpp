#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mpg/bench.hpp"
#include "mpg/data_io.hpp"
#include "mpg/learner.hpp"
#include "mpg/oracle.hpp"
#include "mpg/parallel.hpp"
#include "mpg/selftest.hpp"
#include "run_config.hpp"

namespace {

using namespace mpg;
using namespace mpg::cli;

// Exit codes: 0 success, 1 a check or computation failed, 2 bad input.
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  return out;
}

void require(const std::string& value, const std::string& key) {
  if (value.empty()) throw InvalidInput("missing required setting '" + key + "'");
}

struct Corpus {
  std::vector<ChainExample> chains;
  AlignmentCorpus alignments;
};

Corpus load_corpus(const RunConfig& cfg, bool needGold) {
  require(cfg.data, "data");
  Corpus c;
  if (cfg.task == TaskKind::ChainF1) {
    c.chains = read_conll(cfg.data);
  } else {
    if (needGold) require(cfg.gold, "gold");
    c.alignments = read_alignments(cfg.data, cfg.gold, cfg.scores);
    for (const std::string& w : c.alignments.warnings) std::cerr << "warning: " << w << '\n';
  }
  return c;
}

TrainedModel load_model_file(const RunConfig& cfg, bool taskGiven) {
  require(cfg.model, "model");
  std::ifstream in(cfg.model);
  if (!in) throw InvalidInput("cannot open model '" + cfg.model + "'");
  TrainedModel m = load_model(in);
  if (taskGiven && m.task != cfg.task)
    throw InvalidInput("model task '" + std::string(task_name(m.task)) + "' does not match configured task '" +
                       std::string(task_name(cfg.task)) + "'");
  return m;
}

std::vector<LabelSequence> predict_all(const TrainedModel& model, const Corpus& c, int jobs) {
  const bool chain = model.task == TaskKind::ChainF1;
  const std::size_t n = chain ? c.chains.size() : c.alignments.examples.size();
  std::vector<LabelSequence> out(n);
  parallel_for(n, jobs, [&](std::size_t k) {
    out[k] = chain ? predict_chain(model, c.chains[k].tokens) : predict_alignment(model, c.alignments.examples[k].input);
  });
  return out;
}

bool same_input(const Corpus& c, TaskKind task) {
  if (task == TaskKind::ChainF1) {
    for (const ChainExample& ex : c.chains)
      if (ex.tokens != c.chains.front().tokens) return false;
    return true;
  }
  const AlignmentInput& a = c.alignments.examples.front().input;
  for (const AlignmentExample& ex : c.alignments.examples)
    if (ex.input.source != a.source || ex.input.target != a.target || ex.input.external != a.external) return false;
  return true;
}

// With a single repeated input the gold sequences form an empirical
// conditional distribution, so the Bayes-optimal expected score is
// computable by enumeration.
void consistency_report(const TrainedModel& model, const TrainingProblem& problem, const Corpus& c) {
  if (problem.size() < 2 || !same_input(c, problem.task)) return;
  const ScoreKind kind = problem.score(0);
  std::vector<LabelSequence> masks;
  try {
    masks = strategy_space(kind, problem.gold.front().size(), Side::Predictor, EnumerationBudget{1 << 16});
  } catch (const BudgetExceeded&) {
    return;
  }
  const MixedStrategy empirical = [&] {
    std::map<LabelSequence, double> counts;
    for (const LabelSequence& g : problem.gold) counts[g] += 1.0 / static_cast<double>(problem.size());
    std::vector<LabelSequence> support;
    Eigen::VectorXd p(static_cast<Eigen::Index>(counts.size()));
    for (const auto& [s, w] : counts) {
      p[static_cast<Eigen::Index>(support.size())] = w;
      support.push_back(s);
    }
    return MixedStrategy(std::move(support), std::move(p));
  }();
  auto expected = [&](const LabelSequence& pred) {
    return empirical.expect([&](const LabelSequence& y) { return score(kind, pred, y); });
  };
  double bayes = -1.0;
  for (const LabelSequence& m : masks) bayes = std::max(bayes, expected(m));
  const LabelSequence pred = problem.task == TaskKind::ChainF1 ? predict_chain(model, c.chains.front().tokens)
                                                               : predict_alignment(model, c.alignments.examples.front().input);
  const double got = expected(pred);
  std::printf("expected_score=%.12g\nbayes_score=%.12g\nbayes_gap=%.12g\n", got, bayes, bayes - got);
}

int cmd_train(const RunConfig& cfg) {
  require(cfg.model, "model");
  const Corpus c = load_corpus(cfg, true);
  TrainingProblem problem;
  if (cfg.task == TaskKind::ChainF1) {
    const TagAlphabet classes = class_alphabet(c.chains);
    require(cfg.targetClass, "target-class");
    if (!classes.contains(cfg.targetClass)) throw InvalidInput("target class '" + cfg.targetClass + "' not in the data");
    problem = make_chain_problem(c.chains, classes, classes.index(cfg.targetClass), effective_templates(cfg));
  } else {
    effective_templates(cfg);
    problem = make_alignment_problem(c.alignments.examples, cfg.task, cfg.cost);
  }
  const TrainedModel model = train(problem, cfg.train, [](int epoch, double obj) {
    std::fprintf(stderr, "epoch %d objective %.9g\n", epoch, obj);
  });
  {
    std::ofstream out = open_output(cfg.model);
    save_model(out, model);
  }
  if (!cfg.trace.empty()) {
    std::ofstream out = open_output(cfg.trace);
    out << "epoch objective\n";
    char buf[64];
    for (std::size_t e = 0; e < model.trace.size(); ++e) {
      std::snprintf(buf, sizeof buf, "%zu %.17g\n", e + 1, model.trace[e]);
      out << buf;
    }
  }
  std::printf("examples=%zu\nfeatures=%ld\nepochs=%d\nobjective=%.12g\nuncertified=%ld\n", problem.size(),
              static_cast<long>(problem.index.size()), model.epochs, model.objective, model.uncertified);
  if (model.uncertified > 0)
    std::fprintf(stderr, "warning: %ld example games ended uncertified in exact mode\n", model.uncertified);
  consistency_report(model, problem, c);
  return 0;
}

int cmd_predict(const RunConfig& cfg, bool taskGiven) {
  const TrainedModel model = load_model_file(cfg, taskGiven);
  RunConfig local = cfg;
  local.task = model.task;
  const Corpus c = load_corpus(local, false);
  const std::vector<LabelSequence> preds = predict_all(model, c, cfg.train.jobs);
  std::ofstream file;
  const std::string path = !cfg.out.empty() ? cfg.out : cfg.predictions;
  if (!path.empty()) file = open_output(path);
  std::ostream& out = path.empty() ? std::cout : file;
  if (model.task == TaskKind::ChainF1) {
    const TagAlphabet classes = model_classes(model);
    for (const LabelSequence& p : preds) write_chain_prediction(out, p, classes);
  } else {
    for (std::size_t k = 0; k < preds.size(); ++k) {
      const AlignmentExample& ex = c.alignments.examples[k];
      write_alignment_prediction(out, ex.id, static_cast<int>(ex.input.target.size()), preds[k]);
      out << '\n';
    }
  }
  return 0;
}

int cmd_eval(const RunConfig& cfg, bool taskGiven) {
  RunConfig local = cfg;
  std::optional<TrainedModel> model;
  if (!cfg.model.empty()) {
    model = load_model_file(cfg, taskGiven);
    local.task = model->task;
  }
  const Corpus c = load_corpus(local, true);
  std::vector<LabelSequence> preds;
  if (!cfg.predictions.empty()) {
    std::ifstream in(cfg.predictions);
    if (!in) throw InvalidInput("cannot open predictions '" + cfg.predictions + "'");
    if (local.task == TaskKind::ChainF1) {
      const TagAlphabet classes = model ? model_classes(*model) : class_alphabet(c.chains);
      preds = read_chain_predictions(in, classes);
    } else {
      preds = read_alignment_predictions(in, c.alignments.examples);
    }
  } else if (model) {
    preds = predict_all(*model, c, cfg.train.jobs);
  } else {
    throw InvalidInput("eval needs 'predictions' or 'model'");
  }

  EvalReport report;
  if (local.task == TaskKind::ChainF1) {
    const TagAlphabet classes = model ? model_classes(*model) : class_alphabet(c.chains);
    std::vector<LabelSequence> gold;
    for (const ChainExample& ex : c.chains) gold.push_back(encode_tags(ex, classes));
    report = evaluate_chain(preds, gold, classes);
  } else {
    std::vector<LabelSequence> gold;
    for (const AlignmentExample& ex : c.alignments.examples) gold.push_back(ex.gold);
    report = evaluate_alignment(preds, gold);
  }
  std::cout << report.format();
  return 0;
}

int cmd_selftest(const RunConfig& cfg, const std::string& fault) {
  SelftestOptions opts;
  opts.budget.maxPayoffs = cfg.budget;
  opts.seed = cfg.train.seed;
  opts.trials = cfg.trials;
  opts.injectFault = fault;
  const std::vector<SuiteResult> results = run_selftest(opts);
  std::cout << format_results(results);
  for (const SuiteResult& r : results)
    if (r.status == SuiteStatus::Fail) return kFailed;
  return 0;
}

int cmd_bench(const RunConfig& cfg) {
  BenchOptions opts;
  opts.lengths = cfg.lengths;
  opts.games = cfg.benchGames;
  opts.classes = cfg.benchClasses;
  opts.seed = cfg.train.seed;
  opts.tol = cfg.train.doubleOracleTol;
  const std::string table = format_bench(run_bench(opts));
  std::cout << table;
  if (!cfg.out.empty()) open_output(cfg.out) << table;
  return 0;
}

int cmd_synth(const RunConfig& cfg) {
  if (cfg.task == TaskKind::ChainF1) {
    const auto data = synth_chain(cfg.synthChain);
    if (cfg.out.empty()) {
      write_conll(std::cout, data);
    } else {
      std::ofstream out = open_output(cfg.out);
      write_conll(out, data);
    }
    return 0;
  }
  require(cfg.out, "out");
  const auto data = synth_align(cfg.synthAlign);
  std::ofstream s = open_output(cfg.out + ".sentences"), g = open_output(cfg.out + ".gold"),
                x = open_output(cfg.out + ".scores");
  write_alignment_sentences(s, data);
  write_alignment_links(g, data);
  write_alignment_scores(x, data);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial prediction games for F1, AER and bipartite alignment losses"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string configPath;
  std::vector<std::string> assignments;
  std::map<std::string, std::string> flagValues;
  app.add_option("--config", configPath, "key = value configuration file");
  app.add_option("--set", assignments, "override a config key (key=value), repeatable");
  auto flag = [&](CLI::App* on, const std::string& name, const std::string& key, const std::string& help) {
    on->add_option_function<std::string>(name, [&flagValues, key](const std::string& v) { flagValues[key] = v; }, help);
  };
  flag(&app, "--seed", "seed", "random seed");
  flag(&app, "--jobs", "jobs", "worker threads");
  flag(&app, "--br-mode", "br-mode", "exact or approx best responses during training");
  flag(&app, "--lambda", "lambda", "L2 regularisation");
  flag(&app, "--target-class", "target-class", "class whose F1 is optimised");
  flag(&app, "--task", "task", "chain-f1, align-aer or align-bipartite");

  CLI::App* train = app.add_subcommand("train", "train a model");
  CLI::App* predict = app.add_subcommand("predict", "predict with a model");
  CLI::App* eval = app.add_subcommand("eval", "score predictions against gold data");
  CLI::App* selftest = app.add_subcommand("selftest", "golden and equivalence checks");
  CLI::App* bench = app.add_subcommand("bench", "exact versus approximate double-oracle timing");
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic dataset");
  for (CLI::App* sub : {train, predict, eval}) {
    flag(sub, "--data", "data", "CoNLL file or alignment sentence file");
    flag(sub, "--gold", "gold", "alignment gold links");
    flag(sub, "--scores", "scores", "alignment external scores");
    flag(sub, "--model", "model", "model file");
  }
  flag(train, "--trace", "trace", "objective trace output");
  flag(train, "--epochs", "epochs", "training epochs");
  flag(predict, "--out", "out", "predictions output (default stdout)");
  flag(eval, "--predictions", "predictions", "predictions file");
  flag(selftest, "--budget", "budget", "largest enumeration, in payoff evaluations");
  flag(selftest, "--trials", "trials", "random trials per suite");
  std::string fault;
  selftest->add_option("--inject-fault", fault, "testing hook: perturb the named module")->group("");
  flag(bench, "--lengths", "bench.lengths", "comma-separated lengths");
  flag(bench, "--out", "out", "also write the table here");
  flag(synth, "--out", "out", "output file (chain) or prefix (alignment)");
  flag(synth, "--count", "synth.count", "examples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kBadInput;
  }

  try {
    KeyValues values;
    if (!configPath.empty()) values = read_config_file(configPath);
    for (const auto& [k, v] : read_environment()) values[k] = v;
    for (const std::string& a : assignments) {
      auto [k, v] = split_assignment(a);
      values[k] = v;
    }
    for (const auto& [k, v] : flagValues) values[k] = v;
    const bool taskGiven = values.count("task") > 0;
    const RunConfig cfg = build_config(values);

    if (*train) return cmd_train(cfg);
    if (*predict) return cmd_predict(cfg, taskGiven);
    if (*eval) return cmd_eval(cfg, taskGiven);
    if (*selftest) return cmd_selftest(cfg, fault);
    if (*bench) return cmd_bench(cfg);
    if (*synth) return cmd_synth(cfg);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kBadInput;
}
