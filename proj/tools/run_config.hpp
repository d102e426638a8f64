#pragma once

// Key-value run configuration. Sources in increasing precedence: built-in
// defaults, the --config file, MPG_* environment variables, --set pairs and
// dedicated flags.
//
// File syntax: one "key = value" per line; '#' starts a comment. The
// environment variable for a key is MPG_ followed by the key uppercased with
// '-' and '.' replaced by '_' (lambda -> MPG_LAMBDA, do-tol -> MPG_DO_TOL).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mpg/data_io.hpp"
#include "mpg/game.hpp"
#include "mpg/learner.hpp"

namespace mpg::cli {

inline constexpr const char* kEnvPrefix = "MPG_";

struct RunConfig {
  TaskKind task = TaskKind::ChainF1;
  std::string templates;  // empty: task default
  std::string targetClass;
  std::string data;
  std::string gold;
  std::string scores;
  std::string model;
  std::string predictions;
  std::string trace;
  std::string out;
  TrainConfig train;
  CostFunction cost;
  long budget = 2'000'000;
  int trials = 200;
  std::vector<int> lengths{10, 20, 40, 80};
  int benchGames = 3;
  int benchClasses = 3;
  SynthChainConfig synthChain;
  SynthAlignConfig synthAlign;
};

using KeyValues = std::map<std::string, std::string>;

/// Every recognised key with a one-line description, in display order.
const std::vector<std::pair<std::string, std::string>>& known_keys();

KeyValues read_config_file(const std::string& path);
/// Values of MPG_* variables for known keys.
KeyValues read_environment();
/// Parses "key=value".
std::pair<std::string, std::string> split_assignment(const std::string& text);

/// Rejects unknown keys and malformed values with InvalidInput.
RunConfig build_config(const KeyValues& values);

TemplateSet effective_templates(const RunConfig& cfg);

}  // namespace mpg::cli
