#include "run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace mpg::cli {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(d)) throw InvalidInput(key + ": expected a number, got '" + v + "'");
  return d;
}

long to_long(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long n = 0;
  try {
    n = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw InvalidInput(key + ": expected an integer, got '" + v + "'");
  return n;
}

int to_int(const std::string& key, const std::string& v) {
  return static_cast<int>(to_long(key, v));
}

std::uint64_t to_seed(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || v[0] == '-') throw InvalidInput(key + ": expected a nonnegative integer");
  return n;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidInput(key + ": expected true or false, got '" + v + "'");
}

struct Key {
  std::string name;
  std::string help;
  Setter set;
};

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"task", "chain-f1 | align-aer | align-bipartite", [](RunConfig& c, const std::string& v) { c.task = parse_task(v); }},
      {"templates", "chain-basic | chain-tabular | align-basic", [](RunConfig& c, const std::string& v) {
         parse_template_set(v);
         c.templates = v;
       }},
      {"target-class", "F1 target class name", [](RunConfig& c, const std::string& v) { c.targetClass = v; }},
      {"data", "CoNLL file or alignment sentence file", [](RunConfig& c, const std::string& v) { c.data = v; }},
      {"gold", "alignment gold links file", [](RunConfig& c, const std::string& v) { c.gold = v; }},
      {"scores", "alignment external scores file", [](RunConfig& c, const std::string& v) { c.scores = v; }},
      {"model", "model file", [](RunConfig& c, const std::string& v) { c.model = v; }},
      {"predictions", "predictions file", [](RunConfig& c, const std::string& v) { c.predictions = v; }},
      {"trace", "objective trace output", [](RunConfig& c, const std::string& v) { c.trace = v; }},
      {"out", "output path or prefix", [](RunConfig& c, const std::string& v) { c.out = v; }},
      {"lambda", "L2 coefficient", [](RunConfig& c, const std::string& v) { c.train.lambda = to_double("lambda", v); }},
      {"optimizer", "adadelta | sgd-decay",
       [](RunConfig& c, const std::string& v) { c.train.optimizer = parse_optimizer(v); }},
      {"learning-rate", "sgd-decay base rate",
       [](RunConfig& c, const std::string& v) { c.train.learningRate = to_double("learning-rate", v); }},
      {"rho", "AdaDelta decay", [](RunConfig& c, const std::string& v) { c.train.rho = to_double("rho", v); }},
      {"epsilon", "AdaDelta epsilon", [](RunConfig& c, const std::string& v) { c.train.epsilon = to_double("epsilon", v); }},
      {"epochs", "training epochs", [](RunConfig& c, const std::string& v) { c.train.epochs = to_int("epochs", v); }},
      {"seed", "shuffle and generator seed", [](RunConfig& c, const std::string& v) {
         c.train.seed = to_seed("seed", v);
         c.synthChain.seed = c.train.seed;
         c.synthAlign.seed = c.train.seed;
       }},
      {"br-mode", "exact | approx", [](RunConfig& c, const std::string& v) {
         if (v == "exact")
           c.train.brMode = BrMode::Exact;
         else if (v == "approx")
           c.train.brMode = BrMode::Approximate;
         else
           throw InvalidInput("br-mode: expected exact or approx, got '" + v + "'");
       }},
      {"do-tol", "double-oracle tolerance",
       [](RunConfig& c, const std::string& v) { c.train.doubleOracleTol = to_double("do-tol", v); }},
      {"max-iterations", "double-oracle iteration cap",
       [](RunConfig& c, const std::string& v) { c.train.maxIterations = to_int("max-iterations", v); }},
      {"warm-start", "reuse strategy sets across epochs",
       [](RunConfig& c, const std::string& v) { c.train.warmStart = to_bool("warm-start", v); }},
      {"full-batch", "full-batch instead of per-example steps",
       [](RunConfig& c, const std::string& v) { c.train.fullBatch = to_bool("full-batch", v); }},
      {"keep-best", "full batch: keep the best iterate rather than the last",
       [](RunConfig& c, const std::string& v) { c.train.keepBest = to_bool("keep-best", v); }},
      {"jobs", "worker threads", [](RunConfig& c, const std::string& v) { c.train.jobs = to_int("jobs", v); }},
      {"cost", "six bipartite costs C(N,N) C(N,P) C(N,S) C(A,N) C(A,P) C(A,S)",
       [](RunConfig& c, const std::string& v) {
         std::istringstream ss(v);
         std::vector<std::string> parts;
         for (std::string w; ss >> w;) parts.push_back(w);
         if (parts.size() != 6) throw InvalidInput("cost: expected six numbers");
         for (std::size_t i = 0; i < 6; ++i) c.cost.table[i / 3][i % 3] = to_double("cost", parts[i]);
       }},
      {"budget", "selftest enumeration budget (payoffs)",
       [](RunConfig& c, const std::string& v) { c.budget = to_long("budget", v); }},
      {"trials", "selftest trials per suite", [](RunConfig& c, const std::string& v) { c.trials = to_int("trials", v); }},
      {"bench.lengths", "comma-separated sequence lengths", [](RunConfig& c, const std::string& v) {
         c.lengths.clear();
         std::istringstream ss(v);
         for (std::string w; std::getline(ss, w, ',');) c.lengths.push_back(to_int("bench.lengths", trim(w)));
         if (c.lengths.empty()) throw InvalidInput("bench.lengths: empty list");
       }},
      {"bench.games", "games per length", [](RunConfig& c, const std::string& v) { c.benchGames = to_int("bench.games", v); }},
      {"bench.classes", "classes per chain",
       [](RunConfig& c, const std::string& v) { c.benchClasses = to_int("bench.classes", v); }},
      {"synth.count", "synthetic examples", [](RunConfig& c, const std::string& v) {
         c.synthChain.count = to_int("synth.count", v);
         c.synthAlign.count = c.synthChain.count;
       }},
      {"synth.min-length", "synthetic chain min length",
       [](RunConfig& c, const std::string& v) { c.synthChain.minLength = to_int("synth.min-length", v); }},
      {"synth.max-length", "synthetic chain max length",
       [](RunConfig& c, const std::string& v) { c.synthChain.maxLength = to_int("synth.max-length", v); }},
      {"synth.classes", "synthetic chain classes",
       [](RunConfig& c, const std::string& v) { c.synthChain.classes = to_int("synth.classes", v); }},
      {"synth.min-dim", "synthetic alignment min sentence length",
       [](RunConfig& c, const std::string& v) { c.synthAlign.minDim = to_int("synth.min-dim", v); }},
      {"synth.max-dim", "synthetic alignment max sentence length",
       [](RunConfig& c, const std::string& v) { c.synthAlign.maxDim = to_int("synth.max-dim", v); }},
      {"synth.noise", "synthetic noise rate", [](RunConfig& c, const std::string& v) {
         c.synthChain.noise = to_double("synth.noise", v);
         c.synthAlign.noise = c.synthChain.noise;
       }},
  };
  return table;
}

std::string env_name(const std::string& key) {
  std::string out = kEnvPrefix;
  for (char ch : key) {
    if (ch == '-' || ch == '.')
      out.push_back('_');
    else if (ch >= 'a' && ch <= 'z')
      out.push_back(static_cast<char>(ch - 'a' + 'A'));
    else
      out.push_back(ch);
  }
  return out;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& known_keys() {
  static const std::vector<std::pair<std::string, std::string>> list = [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const Key& k : keys()) out.emplace_back(k.name, k.help);
    return out;
  }();
  return list;
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw InvalidInput("expected key=value, got '" + text + "'");
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  KeyValues out;
  long lineNo = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    try {
      auto [k, v] = split_assignment(line);
      out[k] = v;
    } catch (const InvalidInput& e) {
      throw InvalidInput(path + ":" + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return out;
}

KeyValues read_environment() {
  KeyValues out;
  for (const Key& k : keys())
    if (const char* v = std::getenv(env_name(k.name).c_str())) out[k.name] = v;
  return out;
}

RunConfig build_config(const KeyValues& values) {
  RunConfig cfg;
  // Apply in table order so that, for instance, seed lands before anything
  // derived from it.
  for (const auto& [k, v] : values) {
    bool known = false;
    for (const Key& key : keys()) known = known || key.name == k;
    if (!known) throw InvalidInput("unknown config key '" + k + "'");
  }
  for (const Key& key : keys()) {
    auto it = values.find(key.name);
    if (it != values.end()) key.set(cfg, it->second);
  }
  cfg.train.validate();
  if (cfg.budget <= 0) throw InvalidInput("budget must be positive");
  if (cfg.trials < 1) throw InvalidInput("trials must be positive");
  if (cfg.benchGames < 1 || cfg.benchClasses < 2) throw InvalidInput("bench needs games >= 1 and classes >= 2");
  for (int n : cfg.lengths)
    if (n < 1) throw InvalidInput("bench.lengths must be positive");
  return cfg;
}

TemplateSet effective_templates(const RunConfig& cfg) {
  if (!cfg.templates.empty()) {
    const TemplateSet t = parse_template_set(cfg.templates);
    if ((t == TemplateSet::AlignBasic) != (cfg.task != TaskKind::ChainF1))
      throw InvalidInput("templates '" + cfg.templates + "' do not fit task '" + std::string(task_name(cfg.task)) + "'");
    return t;
  }
  return cfg.task == TaskKind::ChainF1 ? TemplateSet::ChainBasic : TemplateSet::AlignBasic;
}

}  // namespace mpg::cli
