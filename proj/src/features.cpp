#include "mpg/features.hpp"

#include <algorithm>
#include <cmath>

namespace mpg {

FeatureId feature_id(std::string_view name) {
  FeatureId h = 14695981039346656037ULL;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void SparseFeatureVector::add(FeatureId id, double value) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const std::pair<FeatureId, double>& e, FeatureId k) { return e.first < k; });
  if (it != entries_.end() && it->first == id)
    it->second += value;
  else
    entries_.insert(it, {id, value});
}

void SparseFeatureVector::add(const SparseFeatureVector& other, double scale) {
  for (const auto& [id, v] : other.entries_) add(id, scale * v);
}

double SparseFeatureVector::value(FeatureId id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const std::pair<FeatureId, double>& e, FeatureId k) { return e.first < k; });
  return it != entries_.end() && it->first == id ? it->second : 0.0;
}

Eigen::Index FeatureIndex::intern(const std::string& name) {
  const FeatureId id = feature_id(name);
  auto it = slots_.find(id);
  if (it != slots_.end()) {
    if (names_[static_cast<std::size_t>(it->second)] != name)
      throw InvalidInput("feature hash collision: '" + name + "' vs '" + names_[static_cast<std::size_t>(it->second)] + "'");
    return it->second;
  }
  const Eigen::Index slot = size();
  slots_.emplace(id, slot);
  names_.push_back(name);
  return slot;
}

Eigen::Index FeatureIndex::find(FeatureId id) const {
  auto it = slots_.find(id);
  return it == slots_.end() ? -1 : it->second;
}

double WeightVector::weight(FeatureId id) const {
  const Eigen::Index slot = index.find(id);
  return slot < 0 || slot >= theta.size() ? 0.0 : theta[slot];
}

double WeightVector::dot(const SparseFeatureVector& f) const {
  double acc = 0.0;
  for (const auto& [id, v] : f.entries()) acc += weight(id) * v;
  return acc;
}

void WeightVector::sync() {
  const Eigen::Index old = theta.size();
  if (old == index.size()) return;
  theta.conservativeResize(index.size());
  theta.tail(index.size() - old).setZero();
}

std::string_view template_name(TemplateSet t) {
  switch (t) {
    case TemplateSet::ChainBasic:
      return "chain-basic";
    case TemplateSet::ChainTabular:
      return "chain-tabular";
    case TemplateSet::AlignBasic:
      return "align-basic";
  }
  return "";
}

TemplateSet parse_template_set(std::string_view name) {
  for (TemplateSet t : {TemplateSet::ChainBasic, TemplateSet::ChainTabular, TemplateSet::AlignBasic})
    if (template_name(t) == name) return t;
  throw InvalidInput("unknown template set '" + std::string(name) + "'");
}

namespace {

// ASCII only so extraction does not depend on the locale.
std::string lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out)
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  return out;
}

std::string shape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    char k = ch;
    if (ch >= 'A' && ch <= 'Z')
      k = 'X';
    else if (ch >= 'a' && ch <= 'z')
      k = 'x';
    else if (ch >= '0' && ch <= '9')
      k = 'd';
    if (out.empty() || out.back() != k) out.push_back(k);
  }
  return out;
}

void require_position(const std::vector<std::string>& tokens, int t) {
  if (t < 0 || t >= static_cast<int>(tokens.size())) throw InvalidInput("feature position out of range");
}

std::string unigram_name(const TagAlphabet& classes, Tag c, const std::string& obs) {
  return "u:" + classes.name(c) + ":" + obs;
}

std::string transition_name(const TagAlphabet& classes, int t, Tag prev, Tag c, const std::string& obs) {
  return "b:" + (t == 0 ? std::string("START") : classes.name(prev)) + "|" + classes.name(c) + ":" + obs;
}

}  // namespace

std::vector<std::string> chain_unigram_observations(const std::vector<std::string>& tokens, int t, TemplateSet set) {
  require_position(tokens, t);
  if (set == TemplateSet::ChainTabular) return {"t=" + std::to_string(t)};
  if (set != TemplateSet::ChainBasic) throw InvalidInput("template set does not apply to chains");
  const auto n = static_cast<int>(tokens.size());
  const std::string& w = tokens[static_cast<std::size_t>(t)];
  std::vector<std::string> obs{"bias", "w=" + w, "lw=" + lower(w), "sh=" + shape(w)};
  for (std::size_t k = 1; k <= 4 && k <= w.size(); ++k) {
    obs.push_back("p" + std::to_string(k) + "=" + w.substr(0, k));
    obs.push_back("s" + std::to_string(k) + "=" + w.substr(w.size() - k));
  }
  obs.push_back("pw=" + (t > 0 ? tokens[static_cast<std::size_t>(t - 1)] : std::string("<s>")));
  obs.push_back("nw=" + (t + 1 < n ? tokens[static_cast<std::size_t>(t + 1)] : std::string("</s>")));
  if (t == 0) obs.emplace_back("first");
  if (t == n - 1) obs.emplace_back("last");
  return obs;
}

std::vector<std::string> chain_transition_observations(const std::vector<std::string>& tokens, int t,
                                                       TemplateSet set) {
  require_position(tokens, t);
  if (set == TemplateSet::ChainTabular) return {"t=" + std::to_string(t)};
  if (set != TemplateSet::ChainBasic) throw InvalidInput("template set does not apply to chains");
  return {"1"};
}

SparseFeatureVector extract_chain(const std::vector<std::string>& tokens, int t, Tag prev, Tag c,
                                  const TagAlphabet& classes, TemplateSet set) {
  if (c < 0 || c >= classes.size() || (t > 0 && (prev < 0 || prev >= classes.size())))
    throw InvalidInput("extract_chain: class out of range");
  SparseFeatureVector f;
  for (const std::string& o : chain_unigram_observations(tokens, t, set)) f.add(feature_id(unigram_name(classes, c, o)), 1.0);
  for (const std::string& o : chain_transition_observations(tokens, t, set))
    f.add(feature_id(transition_name(classes, t, prev, c, o)), 1.0);
  return f;
}

std::vector<std::pair<std::string, double>> alignment_observations(const AlignmentInput& x, int i, int j) {
  const auto ns = static_cast<int>(x.source.size()), nt = static_cast<int>(x.target.size());
  if (i < 0 || i >= ns || j < 0 || j >= nt) throw InvalidInput("alignment edge out of range");
  const std::string& s = x.source[static_cast<std::size_t>(i)];
  const std::string& t = x.target[static_cast<std::size_t>(j)];
  const double d = std::abs((i + 0.5) / ns - (j + 0.5) / nt);
  std::vector<std::pair<std::string, double>> obs{
      {"bias", 1.0}, {"rel=" + std::to_string(std::min(4, static_cast<int>(d * 5.0))), 1.0}, {"pair=" + s + "|" + t, 1.0}};
  if (lower(s) == lower(t)) obs.emplace_back("same", 1.0);
  if (x.external.size() > 0) obs.emplace_back("ext", x.external[i * nt + j]);
  return obs;
}

SparseFeatureVector extract_alignment(const AlignmentInput& x, int e, Tag tag) {
  SparseFeatureVector f;
  if (tag == adv::N) return f;
  const auto nt = static_cast<int>(x.target.size());
  if (nt == 0) throw InvalidInput("alignment: empty target sentence");
  const std::string block = tag == adv::S ? "S:" : "R:";
  for (const auto& [o, v] : alignment_observations(x, e / nt, e % nt)) f.add(feature_id(block + o), v);
  return f;
}

SparseFeatureVector global_features(const std::vector<std::string>& tokens, const LabelSequence& seq,
                                    const TagAlphabet& classes, TemplateSet set) {
  if (seq.size() != tokens.size()) throw InvalidInput("global_features: length mismatch");
  SparseFeatureVector f;
  for (std::size_t t = 0; t < seq.size(); ++t)
    f.add(extract_chain(tokens, static_cast<int>(t), t > 0 ? seq[t - 1] : 0, seq[t], classes, set));
  return f;
}

SparseFeatureVector global_features(const AlignmentInput& x, const LabelSequence& seq) {
  if (seq.size() != x.source.size() * x.target.size()) throw InvalidInput("global_features: grid size mismatch");
  SparseFeatureVector f;
  for (std::size_t e = 0; e < seq.size(); ++e) f.add(extract_alignment(x, static_cast<int>(e), seq[e]));
  return f;
}

double FeatureList::dot(const Eigen::VectorXd& theta) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < slot.size(); ++k) acc += theta[slot[k]] * value[k];
  return acc;
}

void FeatureList::add_to(Eigen::VectorXd& acc, double scale) const {
  for (std::size_t k = 0; k < slot.size(); ++k) acc[slot[k]] += scale * value[k];
}

namespace {

// `grow` is either null (frozen) or the same object as `index`.
void push(FeatureList& list, const FeatureIndex& index, FeatureIndex* grow, const std::string& name, double value) {
  const Eigen::Index s = grow ? grow->intern(name) : index.find(feature_id(name));
  if (s < 0) return;
  list.slot.push_back(s);
  list.value.push_back(value);
}

CompiledChain build_chain(const std::vector<std::string>& tokens, const TagAlphabet& classes, TemplateSet set,
                          const FeatureIndex& index, FeatureIndex* grow) {
  CompiledChain x;
  x.n = static_cast<int>(tokens.size());
  x.m = classes.size();
  if (x.n == 0) throw InvalidInput("compile_chain: empty sentence");
  const int m = x.m;
  x.unigram.resize(static_cast<std::size_t>(x.n * m));
  x.transition.resize(static_cast<std::size_t>(x.n * (m + 1) * m));
  for (int t = 0; t < x.n; ++t) {
    const auto uni = chain_unigram_observations(tokens, t, set);
    const auto bi = chain_transition_observations(tokens, t, set);
    for (Tag c = 0; c < m; ++c) {
      for (const std::string& o : uni)
        push(x.unigram[static_cast<std::size_t>(t * m + c)], index, grow, unigram_name(classes, c, o), 1.0);
      // Only START precedes position 0; only real classes precede later ones.
      for (Tag prev = 0; prev <= m; ++prev) {
        if ((t == 0) != (prev == m)) continue;
        FeatureList& list = x.transition[static_cast<std::size_t>((t * (m + 1) + prev) * m + c)];
        for (const std::string& o : bi) push(list, index, grow, transition_name(classes, t, prev, c, o), 1.0);
      }
    }
  }
  return x;
}

CompiledAlignment build_alignment(const AlignmentInput& x, const FeatureIndex& index, FeatureIndex* grow) {
  const auto ns = static_cast<int>(x.source.size()), nt = static_cast<int>(x.target.size());
  if (ns == 0 || nt == 0) throw InvalidInput("compile_alignment: empty sentence");
  if (x.external.size() != 0 && x.external.size() != ns * nt)
    throw InvalidInput("compile_alignment: external score count must match the grid");
  CompiledAlignment c;
  c.n = ns * nt;
  c.sure.resize(static_cast<std::size_t>(c.n));
  c.possible.resize(static_cast<std::size_t>(c.n));
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      const auto e = static_cast<std::size_t>(i * nt + j);
      for (const auto& [o, v] : alignment_observations(x, i, j)) {
        push(c.sure[e], index, grow, "S:" + o, v);
        push(c.possible[e], index, grow, "R:" + o, v);
      }
    }
  return c;
}

}  // namespace

CompiledChain compile_chain(const std::vector<std::string>& tokens, const TagAlphabet& classes, TemplateSet set,
                            const FeatureIndex& index) {
  return build_chain(tokens, classes, set, index, nullptr);
}

CompiledAlignment compile_alignment(const AlignmentInput& x, const FeatureIndex& index) {
  return build_alignment(x, index, nullptr);
}

CompiledChain register_chain(const std::vector<std::string>& tokens, const TagAlphabet& classes, TemplateSet set,
                             FeatureIndex& index) {
  return build_chain(tokens, classes, set, index, &index);
}

CompiledAlignment register_alignment(const AlignmentInput& x, FeatureIndex& index) {
  return build_alignment(x, index, &index);
}

PotentialTable potentials(const Eigen::VectorXd& theta, const CompiledExample& x) {
  if (const auto* c = std::get_if<CompiledChain>(&x)) {
    ChainPotentials psi = ChainPotentials::zeros(c->n, c->m);
    const int m = c->m;
    for (int t = 0; t < c->n; ++t)
      for (Tag cls = 0; cls < m; ++cls) {
        psi.unigram(t, cls) = c->unigram[static_cast<std::size_t>(t * m + cls)].dot(theta);
        for (Tag prev = 0; prev <= m; ++prev)
          psi.transition[static_cast<std::size_t>(t)](prev, cls) =
              c->transition[static_cast<std::size_t>((t * (m + 1) + prev) * m + cls)].dot(theta);
      }
    return psi;
  }
  const auto& a = std::get<CompiledAlignment>(x);
  AlignmentPotentials psi = AlignmentPotentials::zeros(a.n);
  for (int e = 0; e < a.n; ++e) {
    psi.psiS[e] = a.sure[static_cast<std::size_t>(e)].dot(theta);
    psi.psiR[e] = a.possible[static_cast<std::size_t>(e)].dot(theta);
  }
  return psi;
}

void accumulate_features(const CompiledExample& x, const LabelSequence& seq, double scale, Eigen::VectorXd& acc) {
  if (const auto* c = std::get_if<CompiledChain>(&x)) {
    if (static_cast<int>(seq.size()) != c->n) throw InvalidInput("features: length mismatch");
    const int m = c->m;
    for (int t = 0; t < c->n; ++t) {
      const Tag y = seq[static_cast<std::size_t>(t)];
      const Tag prev = t == 0 ? m : seq[static_cast<std::size_t>(t - 1)];
      c->unigram[static_cast<std::size_t>(t * m + y)].add_to(acc, scale);
      c->transition[static_cast<std::size_t>((t * (m + 1) + prev) * m + y)].add_to(acc, scale);
    }
    return;
  }
  const auto& a = std::get<CompiledAlignment>(x);
  if (static_cast<int>(seq.size()) != a.n) throw InvalidInput("features: length mismatch");
  for (int e = 0; e < a.n; ++e) {
    const Tag y = seq[static_cast<std::size_t>(e)];
    if (y == adv::S) a.sure[static_cast<std::size_t>(e)].add_to(acc, scale);
    if (y == adv::P) a.possible[static_cast<std::size_t>(e)].add_to(acc, scale);
  }
}

Eigen::VectorXd global_dense(const CompiledExample& x, const LabelSequence& seq, Eigen::Index dim) {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(dim);
  accumulate_features(x, seq, 1.0, phi);
  return phi;
}

}  // namespace mpg
