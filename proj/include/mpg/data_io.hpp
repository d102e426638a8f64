#pragma once

// Dataset formats, synthetic generators and evaluation reports.
//
// CoNLL: whitespace-separated columns, token first and tag last, blank lines
// between sentences, "-DOCSTART-" lines skipped, B-/I- prefixes dropped.
//
// Alignments come in up to three files:
//   sentences  id<TAB>source tokens<TAB>target tokens
//   links      id i j flag     (1-based; flag S or P for gold, A for output)
//   scores     id i j value    (optional external per-edge score)
// Edges are flattened row-major: e = (i-1) * |target| + (j-1).

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "mpg/core.hpp"
#include "mpg/features.hpp"

namespace mpg {

struct ChainExample {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  // Columns between token and tag, per token; possibly empty.
  std::vector<std::vector<std::string>> extra;
};

struct AlignmentExample {
  std::string id;
  AlignmentInput input;
  LabelSequence gold;  // {N,P,S}
};

/// Malformed lines throw InvalidInput naming the source and line number.
std::vector<ChainExample> read_conll(const std::string& path);
std::vector<ChainExample> read_conll(std::istream& in, const std::string& sourceName);
void write_conll(std::ostream& out, const std::vector<ChainExample>& examples);

/// Distinct tags of a dataset in sorted order.
TagAlphabet class_alphabet(const std::vector<ChainExample>& examples);
LabelSequence encode_tags(const ChainExample& ex, const TagAlphabet& classes);

struct AlignmentCorpus {
  std::vector<AlignmentExample> examples;
  std::vector<std::string> warnings;
};

/// goldPath and scoresPath may be empty. Duplicate links keep the last flag
/// and add a warning.
AlignmentCorpus read_alignments(const std::string& sentencePath, const std::string& goldPath,
                                const std::string& scoresPath = "");
AlignmentCorpus read_alignments(std::istream& sentences, std::istream* gold, std::istream* scores);

void write_alignment_sentences(std::ostream& out, const std::vector<AlignmentExample>& examples);
/// Gold links of every example (S or P flags).
void write_alignment_links(std::ostream& out, const std::vector<AlignmentExample>& examples);
void write_alignment_scores(std::ostream& out, const std::vector<AlignmentExample>& examples);
/// A-flagged links of one {N,A} prediction.
void write_alignment_prediction(std::ostream& out, const std::string& id, int targetCount, const LabelSequence& pred);

/// Reads A-flagged links into {N,A} sequences shaped like `reference`.
std::vector<LabelSequence> read_alignment_predictions(std::istream& in, const std::vector<AlignmentExample>& reference);

/// Chain predictions: one sentence per line, tag names separated by spaces.
void write_chain_prediction(std::ostream& out, const LabelSequence& pred, const TagAlphabet& classes);
std::vector<LabelSequence> read_chain_predictions(std::istream& in, const TagAlphabet& classes);

/// mt19937_64 with hand-written conversions: the standard fixes the engine's
/// output but not the distributions', so these keep datasets bit-identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on {0, ..., k-1}.
  int below(int k);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct SynthChainConfig {
  std::uint64_t seed = 1;
  int count = 100;
  int minLength = 5;
  int maxLength = 12;
  int classes = 3;
  double noise = 0.2;
  int vocabPerClass = 8;
  double stay = 0.7;
};

/// Latent tags follow a sticky Markov chain (keep the previous class with
/// probability `stay`, otherwise draw uniformly). Each token comes from the
/// vocabulary of its tag, except that with probability `noise` the emitting
/// class is redrawn uniformly. Class names are C0, C1, ...
std::vector<ChainExample> synth_chain(const SynthChainConfig& cfg);

struct SynthAlignConfig {
  std::uint64_t seed = 1;
  int count = 50;
  int minDim = 2;
  int maxDim = 5;
  double noise = 0.2;
  int vocab = 20;
  double sureRate = 0.8;
};

/// Near-diagonal one-to-one gold links (S with probability sureRate, else P)
/// between source word sK and its translation tK. With probability `noise`
/// a linked target token is replaced by a random one. The external score of
/// an edge is 1 for a translation pair, flipped with probability `noise`.
std::vector<AlignmentExample> synth_align(const SynthAlignConfig& cfg);

struct ClassScore {
  std::string name;
  long truePositive = 0;
  long falsePositive = 0;
  long falseNegative = 0;
  double f1() const;
};

struct EvalReport {
  bool chain = true;
  std::vector<ClassScore> classes;  // chain tasks
  AerCounts aer;                    // alignment tasks
  long examples = 0;

  /// Aligned text table followed by a key=value block.
  std::string format() const;
};

/// Tag-level F1 per class with counts pooled over the corpus.
EvalReport evaluate_chain(const std::vector<LabelSequence>& predicted, const std::vector<LabelSequence>& gold,
                          const TagAlphabet& classes);
/// Corpus AER from counts pooled over the corpus.
EvalReport evaluate_alignment(const std::vector<LabelSequence>& predicted, const std::vector<LabelSequence>& gold);

}  // namespace mpg
