#include <algorithm>
#include <cmath>

#include "mpg/data_io.hpp"

namespace mpg {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int Rng::below(int k) {
  if (k <= 0) throw InvalidInput("Rng::below: k must be positive");
  return std::min(k - 1, static_cast<int>(uniform() * k));
}

std::vector<ChainExample> synth_chain(const SynthChainConfig& cfg) {
  if (cfg.count < 0 || cfg.minLength < 1 || cfg.maxLength < cfg.minLength || cfg.classes < 2 || cfg.vocabPerClass < 1 ||
      !(cfg.noise >= 0.0 && cfg.noise <= 1.0) || !(cfg.stay >= 0.0 && cfg.stay <= 1.0))
    throw InvalidInput("synth_chain: invalid configuration");
  Rng rng(cfg.seed);
  std::vector<ChainExample> out;
  out.reserve(static_cast<std::size_t>(cfg.count));
  for (int s = 0; s < cfg.count; ++s) {
    ChainExample ex;
    const int n = cfg.minLength + rng.below(cfg.maxLength - cfg.minLength + 1);
    int tag = rng.below(cfg.classes);
    for (int t = 0; t < n; ++t) {
      if (t > 0 && rng.uniform() >= cfg.stay) tag = rng.below(cfg.classes);
      const int emitter = rng.uniform() < cfg.noise ? rng.below(cfg.classes) : tag;
      ex.tokens.push_back("w" + std::to_string(emitter) + "_" + std::to_string(rng.below(cfg.vocabPerClass)));
      ex.tags.push_back("C" + std::to_string(tag));
      ex.extra.emplace_back();
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<AlignmentExample> synth_align(const SynthAlignConfig& cfg) {
  if (cfg.count < 0 || cfg.minDim < 1 || cfg.maxDim < cfg.minDim || cfg.vocab < 1 ||
      !(cfg.noise >= 0.0 && cfg.noise <= 1.0) || !(cfg.sureRate >= 0.0 && cfg.sureRate <= 1.0))
    throw InvalidInput("synth_align: invalid configuration");
  Rng rng(cfg.seed);
  std::vector<AlignmentExample> out;
  out.reserve(static_cast<std::size_t>(cfg.count));
  for (int s = 0; s < cfg.count; ++s) {
    AlignmentExample ex;
    ex.id = "s" + std::to_string(s + 1);
    const int ns = cfg.minDim + rng.below(cfg.maxDim - cfg.minDim + 1);
    const int nt = cfg.minDim + rng.below(cfg.maxDim - cfg.minDim + 1);
    std::vector<int> srcWord(static_cast<std::size_t>(ns));
    for (int i = 0; i < ns; ++i) {
      srcWord[static_cast<std::size_t>(i)] = rng.below(cfg.vocab);
      ex.input.source.push_back("s" + std::to_string(srcWord[static_cast<std::size_t>(i)]));
    }
    std::vector<int> tgtWord(static_cast<std::size_t>(nt));
    for (int j = 0; j < nt; ++j) tgtWord[static_cast<std::size_t>(j)] = rng.below(cfg.vocab);

    ex.gold = LabelSequence(static_cast<std::size_t>(ns * nt), adv::N);
    std::vector<char> used(static_cast<std::size_t>(nt), 0);
    for (int i = 0; i < ns; ++i) {
      // Diagonal position with a jitter of -1, 0 or +1.
      const double diag = ns == 1 ? 0.0 : static_cast<double>(i) * (nt - 1) / (ns - 1);
      const int j = std::clamp(static_cast<int>(std::lround(diag)) + rng.below(3) - 1, 0, nt - 1);
      if (used[static_cast<std::size_t>(j)]) continue;
      used[static_cast<std::size_t>(j)] = 1;
      ex.gold[static_cast<std::size_t>(i * nt + j)] = rng.uniform() < cfg.sureRate ? adv::S : adv::P;
      tgtWord[static_cast<std::size_t>(j)] =
          rng.uniform() < cfg.noise ? rng.below(cfg.vocab) : srcWord[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < nt; ++j) ex.input.target.push_back("t" + std::to_string(tgtWord[static_cast<std::size_t>(j)]));

    ex.input.external = Eigen::VectorXd::Zero(ns * nt);
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < nt; ++j) {
        const bool pair = srcWord[static_cast<std::size_t>(i)] == tgtWord[static_cast<std::size_t>(j)];
        ex.input.external[i * nt + j] = (pair != (rng.uniform() < cfg.noise)) ? 1.0 : 0.0;
      }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace mpg
