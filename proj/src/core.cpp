#include "mpg/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mpg {

TagAlphabet::TagAlphabet(std::vector<std::string> names, AlphabetRole role)
    : names_(std::move(names)), role_(role) {
  if (names_.empty()) throw InvalidInput("tag alphabet must not be empty");
  std::set<std::string> seen(names_.begin(), names_.end());
  if (seen.size() != names_.size()) throw InvalidInput("tag alphabet names must be unique");
}

TagAlphabet TagAlphabet::chain(std::vector<std::string> names) {
  return TagAlphabet(std::move(names), AlphabetRole::Chain);
}

TagAlphabet TagAlphabet::alignment_adversary() {
  return TagAlphabet({"N", "P", "S"}, AlphabetRole::AlignmentAdversary);
}

TagAlphabet TagAlphabet::alignment_predictor() {
  return TagAlphabet({"N", "A"}, AlphabetRole::AlignmentPredictor);
}

Tag TagAlphabet::index(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InvalidInput("unknown tag '" + std::string(name) + "'");
  return static_cast<Tag>(it - names_.begin());
}

bool TagAlphabet::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

int LabelSequence::count(Tag t) const {
  return static_cast<int>(std::count(tags_.begin(), tags_.end(), t));
}

std::size_t LabelSequenceHash::operator()(const LabelSequence& s) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (Tag t : s) {
    h ^= static_cast<std::size_t>(t) + 0x9e3779b97f4a7c15ull;
    h *= 1099511628211ull;
  }
  return h;
}

void validate(const LabelSequence& seq, const TagAlphabet& alphabet) {
  if (seq.empty()) throw InvalidInput("label sequence must not be empty");
  for (Tag t : seq)
    if (t < 0 || t >= alphabet.size()) throw InvalidInput("tag index out of alphabet range");
}

std::string to_string(const LabelSequence& seq, const TagAlphabet& alphabet) {
  const bool compact = std::all_of(alphabet.names().begin(), alphabet.names().end(),
                                   [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!compact && i > 0) out += ' ';
    out += alphabet.name(seq[i]);
  }
  return out;
}

LabelSequence parse_compact(std::string_view text, const TagAlphabet& alphabet) {
  std::vector<Tag> tags;
  tags.reserve(text.size());
  for (char ch : text) tags.push_back(alphabet.index(std::string_view(&ch, 1)));
  return LabelSequence(std::move(tags));
}

MixedStrategy::MixedStrategy(std::vector<LabelSequence> support, Eigen::VectorXd probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.empty()) throw InvalidInput("mixed strategy needs a nonempty support");
  if (static_cast<std::size_t>(probs_.size()) != support_.size())
    throw InvalidInput("mixed strategy support/probability size mismatch");
  const std::size_t n = support_.front().size();
  if (n == 0) throw InvalidInput("mixed strategy sequences must be nonempty");
  for (const auto& s : support_)
    if (s.size() != n) throw InvalidInput("mixed strategy sequences differ in length");
  if ((probs_.array() < 0.0).any() || !probs_.allFinite())
    throw InvalidInput("mixed strategy probabilities must be finite and nonnegative");
  if (std::abs(probs_.sum() - 1.0) > 1e-9) throw InvalidInput("mixed strategy probabilities must sum to 1");
  std::vector<LabelSequence> sorted = support_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidInput("mixed strategy support has duplicates");
}

MixedStrategy MixedStrategy::pure(LabelSequence seq) {
  return MixedStrategy({std::move(seq)}, Eigen::VectorXd::Ones(1));
}

MixedStrategy MixedStrategy::uniform(std::vector<LabelSequence> support) {
  const auto k = static_cast<Eigen::Index>(support.size());
  return MixedStrategy(std::move(support), Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k)));
}

Eigen::VectorXd MixedStrategy::position_marginals(Tag tag) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(length()));
  for (std::size_t s = 0; s < support_.size(); ++s)
    for (std::size_t i = 0; i < length(); ++i)
      if (support_[s][i] == tag) out[static_cast<Eigen::Index>(i)] += prob(s);
  return out;
}

MarginalCountMatrix marginal_count_matrix(const MixedStrategy& strategy, Tag target) {
  const auto n = static_cast<Eigen::Index>(strategy.length());
  MarginalCountMatrix m{Eigen::MatrixXd::Zero(n, n), 0.0};
  for (std::size_t s = 0; s < strategy.size(); ++s) {
    const LabelSequence& seq = strategy.sequence(s);
    const int k = seq.count(target);
    if (k == 0) {
      m.emptyMass += strategy.prob(s);
      continue;
    }
    for (Eigen::Index i = 0; i < n; ++i)
      if (seq[static_cast<std::size_t>(i)] == target) m.entries(i, k - 1) += strategy.prob(s);
  }
  return m;
}

Eigen::MatrixXd joint_count_marginals(const MixedStrategy& strategy, Tag countTag, Tag positionTag) {
  const auto n = static_cast<Eigen::Index>(strategy.length());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n + 1);
  for (std::size_t s = 0; s < strategy.size(); ++s) {
    const LabelSequence& seq = strategy.sequence(s);
    const int k = seq.count(countTag);
    for (Eigen::Index i = 0; i < n; ++i)
      if (seq[static_cast<std::size_t>(i)] == positionTag) out(i, k) += strategy.prob(s);
  }
  return out;
}

ChainPotentials ChainPotentials::zeros(int n, int m) {
  ChainPotentials p;
  p.unigram = Eigen::MatrixXd::Zero(n, m);
  p.transition.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(m + 1, m));
  return p;
}

AlignmentPotentials AlignmentPotentials::zeros(int n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

double lagrangian(const LabelSequence& seq, const ChainPotentials& psi) {
  if (static_cast<int>(seq.size()) != psi.length()) throw InvalidInput("potential/sequence length mismatch");
  double acc = 0.0;
  Tag prev = psi.start();
  for (std::size_t t = 0; t < seq.size(); ++t) {
    acc += psi.step(static_cast<int>(t), prev, seq[t]);
    prev = seq[t];
  }
  return acc;
}

double lagrangian(const LabelSequence& seq, const AlignmentPotentials& psi) {
  if (static_cast<int>(seq.size()) != psi.length()) throw InvalidInput("potential/sequence length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    if (seq[i] == adv::S) acc += psi.psiS[e];
    else if (seq[i] == adv::P) acc += psi.psiR[e];
  }
  return acc;
}

double lagrangian(const LabelSequence& seq, const PotentialTable& psi) {
  return std::visit([&](const auto& p) { return lagrangian(seq, p); }, psi);
}

double f1_score(const LabelSequence& pred, const LabelSequence& gold, Tag target) {
  if (pred.size() != gold.size()) throw InvalidInput("f1_score: length mismatch");
  int both = 0, np = 0, ng = 0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    const bool p = pred[t] == target, g = gold[t] == target;
    np += p;
    ng += g;
    both += p && g;
  }
  if (np + ng == 0) return 1.0;
  return 2.0 * both / (np + ng);
}

double AerCounts::aer() const {
  const long denom = predicted + sure;
  if (denom == 0) return 0.0;
  // One rounding of an integer ratio, so 5/13 comes out as the double 5/13.
  return static_cast<double>(denom - matchSure - matchPossible) / static_cast<double>(denom);
}

AerCounts& AerCounts::operator+=(const AerCounts& o) {
  matchSure += o.matchSure;
  matchPossible += o.matchPossible;
  predicted += o.predicted;
  sure += o.sure;
  return *this;
}

AerCounts aer_counts(const LabelSequence& pred, const LabelSequence& gold) {
  if (pred.size() != gold.size()) throw InvalidInput("aer_score: length mismatch");
  AerCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool a = pred[i] == pred::A;
    c.predicted += a;
    c.sure += gold[i] == adv::S;
    c.matchSure += a && gold[i] == adv::S;
    c.matchPossible += a && (gold[i] == adv::S || gold[i] == adv::P);
  }
  return c;
}

double aer_score(const LabelSequence& pred, const LabelSequence& gold) { return aer_counts(pred, gold).aer(); }

}  // namespace mpg
