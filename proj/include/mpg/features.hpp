#pragma once

// Sparse features, the dense weight layout, and the theta . Phi contraction
// that turns weights into Lagrangian potentials.

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "mpg/core.hpp"

namespace mpg {

using FeatureId = std::uint64_t;

/// 64-bit FNV-1a of the namespaced feature name.
FeatureId feature_id(std::string_view name);

/// (id, value) pairs with unique ids, sorted by id.
class SparseFeatureVector {
 public:
  void add(FeatureId id, double value);
  void add(const SparseFeatureVector& other, double scale = 1.0);
  const std::vector<std::pair<FeatureId, double>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double value(FeatureId id) const;
  bool operator==(const SparseFeatureVector&) const = default;

 private:
  std::vector<std::pair<FeatureId, double>> entries_;
};

/// Feature name registry mapping ids to dense slots of theta. Registering
/// two distinct names with the same id throws.
class FeatureIndex {
 public:
  /// Slot of `name`, adding it if absent.
  Eigen::Index intern(const std::string& name);
  /// Slot of `id`, or -1 when unknown.
  Eigen::Index find(FeatureId id) const;
  Eigen::Index size() const { return static_cast<Eigen::Index>(names_.size()); }
  const std::string& name(Eigen::Index slot) const { return names_[static_cast<std::size_t>(slot)]; }

 private:
  std::unordered_map<FeatureId, Eigen::Index> slots_;
  std::vector<std::string> names_;
};

/// Weights: theta over the slots of an index.
struct WeightVector {
  FeatureIndex index;
  Eigen::VectorXd theta;

  double weight(FeatureId id) const;
  double dot(const SparseFeatureVector& f) const;
  /// Grows theta with zeros to cover every interned name.
  void sync();
};

enum class TemplateSet { ChainBasic, ChainTabular, AlignBasic };

inline constexpr int kTemplateVersion = 1;
std::string_view template_name(TemplateSet t);
TemplateSet parse_template_set(std::string_view name);

/// Observation strings firing at position t. The transition observations
/// are paired with (previous class, class); the unigram ones with the class.
std::vector<std::string> chain_unigram_observations(const std::vector<std::string>& tokens, int t, TemplateSet set);
std::vector<std::string> chain_transition_observations(const std::vector<std::string>& tokens, int t, TemplateSet set);

/// Features of class c at position t (0-based) after class prev; prev is
/// ignored at t = 0 where the START block is used.
SparseFeatureVector extract_chain(const std::vector<std::string>& tokens, int t, Tag prev, Tag c,
                                  const TagAlphabet& classes, TemplateSet set);

struct AlignmentInput {
  std::vector<std::string> source;
  std::vector<std::string> target;
  Eigen::VectorXd external;  // per edge, row-major; empty when absent
};

/// Observations of edge (i, j) and their values; shared by the S and R blocks.
std::vector<std::pair<std::string, double>> alignment_observations(const AlignmentInput& x, int i, int j);

/// Features of edge e (row-major) carrying `tag`; N fires nothing.
SparseFeatureVector extract_alignment(const AlignmentInput& x, int e, Tag tag);

SparseFeatureVector global_features(const std::vector<std::string>& tokens, const LabelSequence& seq,
                                    const TagAlphabet& classes, TemplateSet set);
SparseFeatureVector global_features(const AlignmentInput& x, const LabelSequence& seq);

/// Dense-slot feature lists of one example, precomputed once against an
/// index. Features missing from a frozen index are dropped (weight 0).
struct FeatureList {
  std::vector<Eigen::Index> slot;
  std::vector<double> value;

  double dot(const Eigen::VectorXd& theta) const;
  void add_to(Eigen::VectorXd& acc, double scale) const;
};

struct CompiledChain {
  int n = 0;
  int m = 0;
  std::vector<FeatureList> unigram;     // [t * m + c]
  std::vector<FeatureList> transition;  // [(t * (m+1) + prev) * m + c]; prev == m is START
};

struct CompiledAlignment {
  int n = 0;
  std::vector<FeatureList> sure;      // [e]
  std::vector<FeatureList> possible;  // [e]
};

using CompiledExample = std::variant<CompiledChain, CompiledAlignment>;

/// Frozen index: names it does not hold are dropped (weight 0).
CompiledChain compile_chain(const std::vector<std::string>& tokens, const TagAlphabet& classes, TemplateSet set,
                            const FeatureIndex& index);
CompiledAlignment compile_alignment(const AlignmentInput& x, const FeatureIndex& index);

/// Growing index: unseen names are interned first (training).
CompiledChain register_chain(const std::vector<std::string>& tokens, const TagAlphabet& classes, TemplateSet set,
                             FeatureIndex& index);
CompiledAlignment register_alignment(const AlignmentInput& x, FeatureIndex& index);

/// psi = theta . Phi per position (chain) or per edge (alignment).
PotentialTable potentials(const Eigen::VectorXd& theta, const CompiledExample& x);

/// Dense Phi(x, seq) of size `dim`; lagrangian(seq, potentials(theta, x))
/// equals theta . global_dense(x, seq).
Eigen::VectorXd global_dense(const CompiledExample& x, const LabelSequence& seq, Eigen::Index dim);

/// acc += scale * Phi(x, seq), avoiding a dense temporary per sequence.
void accumulate_features(const CompiledExample& x, const LabelSequence& seq, double scale, Eigen::VectorXd& acc);

}  // namespace mpg
