#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace mpg {

using Tag = int;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Alignment alphabets. Index order N < P < S (adversary) and N < A
// (predictor) makes lexicographic enumeration match the conventional
// NN, NP, NS, ... listing of two-edge games.
namespace adv {
inline constexpr Tag N = 0;
inline constexpr Tag P = 1;
inline constexpr Tag S = 2;
}  // namespace adv
namespace pred {
inline constexpr Tag N = 0;
inline constexpr Tag A = 1;
}  // namespace pred

enum class AlphabetRole { Chain, AlignmentAdversary, AlignmentPredictor };

class TagAlphabet {
 public:
  static TagAlphabet chain(std::vector<std::string> names);
  static TagAlphabet alignment_adversary();
  static TagAlphabet alignment_predictor();

  AlphabetRole role() const { return role_; }
  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(Tag t) const { return names_.at(static_cast<std::size_t>(t)); }
  const std::vector<std::string>& names() const { return names_; }
  /// Throws InvalidInput for unknown names.
  Tag index(std::string_view name) const;
  bool contains(std::string_view name) const;

 private:
  TagAlphabet(std::vector<std::string> names, AlphabetRole role);

  std::vector<std::string> names_;
  AlphabetRole role_;
};

class LabelSequence {
 public:
  LabelSequence() = default;
  explicit LabelSequence(std::vector<Tag> tags) : tags_(std::move(tags)) {}
  LabelSequence(std::initializer_list<Tag> tags) : tags_(tags) {}
  LabelSequence(std::size_t n, Tag fill) : tags_(n, fill) {}

  std::size_t size() const { return tags_.size(); }
  bool empty() const { return tags_.empty(); }
  Tag operator[](std::size_t i) const { return tags_[i]; }
  Tag& operator[](std::size_t i) { return tags_[i]; }
  auto begin() const { return tags_.begin(); }
  auto end() const { return tags_.end(); }
  const std::vector<Tag>& tags() const { return tags_; }

  int count(Tag t) const;

  auto operator<=>(const LabelSequence&) const = default;
  bool operator==(const LabelSequence&) const = default;

 private:
  std::vector<Tag> tags_;
};

struct LabelSequenceHash {
  std::size_t operator()(const LabelSequence& s) const noexcept;
};

/// Throws InvalidInput if `seq` is empty or holds an index outside `alphabet`.
void validate(const LabelSequence& seq, const TagAlphabet& alphabet);

/// Renders tags by name, space separated; single-character alphabets are
/// rendered without separators ("NPS").
std::string to_string(const LabelSequence& seq, const TagAlphabet& alphabet);
/// Inverse of to_string for single-character alphabets ("SNP").
LabelSequence parse_compact(std::string_view text, const TagAlphabet& alphabet);

class MixedStrategy {
 public:
  /// Validates: same lengths, distinct support, probs >= 0 summing to 1 (1e-9).
  MixedStrategy(std::vector<LabelSequence> support, Eigen::VectorXd probs);
  static MixedStrategy pure(LabelSequence seq);
  static MixedStrategy uniform(std::vector<LabelSequence> support);

  std::size_t size() const { return support_.size(); }
  std::size_t length() const { return support_.front().size(); }
  const LabelSequence& sequence(std::size_t i) const { return support_[i]; }
  double prob(std::size_t i) const { return probs_[static_cast<Eigen::Index>(i)]; }
  const std::vector<LabelSequence>& support() const { return support_; }
  const Eigen::VectorXd& probs() const { return probs_; }

  /// Per-position probability that the sequence carries `tag`.
  Eigen::VectorXd position_marginals(Tag tag) const;

  template <typename F>
  double expect(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) acc += prob(i) * f(support_[i]);
    return acc;
  }

 private:
  std::vector<LabelSequence> support_;
  Eigen::VectorXd probs_;
};

/// entries(i, k-1) = P(sequence has exactly k target tags and position i is
/// a target), k = 1..n. The zero-count mass is held separately.
struct MarginalCountMatrix {
  Eigen::MatrixXd entries;
  double emptyMass = 0.0;

  int length() const { return static_cast<int>(entries.rows()); }
  double at(int i, int k) const { return entries(i, k - 1); }
  /// P(count = k) for k >= 1.
  double count_prob(int k) const { return entries.col(k - 1).sum() / k; }
};

MarginalCountMatrix marginal_count_matrix(const MixedStrategy& strategy, Tag target);

/// Generalised joint marginals: result(i, k) = P(#countTag == k and
/// position i carries positionTag), k = 0..n (n+1 columns).
Eigen::MatrixXd joint_count_marginals(const MixedStrategy& strategy, Tag countTag, Tag positionTag);

// Lagrangian potentials.
struct ChainPotentials {
  Eigen::MatrixXd unigram;                  // n x m
  std::vector<Eigen::MatrixXd> transition;  // n matrices of (m+1) x m; row m is START

  static ChainPotentials zeros(int n, int m);

  int length() const { return static_cast<int>(unigram.rows()); }
  int classes() const { return static_cast<int>(unigram.cols()); }
  Tag start() const { return classes(); }
  /// psi_t^u(c) + psi_t^b(prev, c). At t = 0 the only valid prev is start().
  double step(int t, Tag prev, Tag c) const { return unigram(t, c) + transition[t](prev, c); }
};

struct AlignmentPotentials {
  Eigen::VectorXd psiS;  // potential for S tags
  Eigen::VectorXd psiR;  // potential for P tags; N pays 0

  static AlignmentPotentials zeros(int n);
  int length() const { return static_cast<int>(psiS.size()); }
};

using PotentialTable = std::variant<ChainPotentials, AlignmentPotentials>;

double lagrangian(const LabelSequence& seq, const ChainPotentials& psi);
double lagrangian(const LabelSequence& seq, const AlignmentPotentials& psi);
double lagrangian(const LabelSequence& seq, const PotentialTable& psi);

/// Per-class F1 of `pred` against `gold`. Both empty scores 1.
double f1_score(const LabelSequence& pred, const LabelSequence& gold, Tag target);

/// Alignment error rate of an {N,A} prediction against an {N,P,S} gold
/// sequence; S counts as P. A zero denominator yields AER 0.
double aer_score(const LabelSequence& pred, const LabelSequence& gold);

/// The additive pieces of AER, used for corpus-level pooling.
struct AerCounts {
  long matchSure = 0;      // |A and S|
  long matchPossible = 0;  // |A and (S or P)|
  long predicted = 0;      // |A|
  long sure = 0;           // |S|

  double aer() const;
  AerCounts& operator+=(const AerCounts& o);
};
AerCounts aer_counts(const LabelSequence& pred, const LabelSequence& gold);

}  // namespace mpg
