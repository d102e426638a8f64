#include "mpg/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace mpg {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string w; ss >> w;) out.push_back(w);
  return out;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::string collapse_bio(const std::string& tag) {
  if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') return tag.substr(2);
  return tag;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return in;
}

std::string where(const std::string& source, long line) {
  return source + ":" + std::to_string(line);
}

}  // namespace

std::vector<ChainExample> read_conll(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_conll(in, path);
}

std::vector<ChainExample> read_conll(std::istream& in, const std::string& sourceName) {
  std::vector<ChainExample> out;
  ChainExample cur;
  auto flush = [&] {
    if (!cur.tokens.empty()) out.push_back(std::move(cur));
    cur = ChainExample{};
  };
  long lineNo = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineNo;
    if (blank(line)) {
      flush();
      continue;
    }
    std::vector<std::string> cols = split_ws(line);
    if (cols.front() == "-DOCSTART-") continue;
    if (cols.size() < 2)
      throw InvalidInput(where(sourceName, lineNo) + ": expected at least token and tag columns: '" + line + "'");
    cur.tokens.push_back(cols.front());
    cur.tags.push_back(collapse_bio(cols.back()));
    cur.extra.emplace_back(cols.begin() + 1, cols.end() - 1);
  }
  flush();
  return out;
}

void write_conll(std::ostream& out, const std::vector<ChainExample>& examples) {
  for (std::size_t s = 0; s < examples.size(); ++s) {
    if (s > 0) out << '\n';
    const ChainExample& ex = examples[s];
    for (std::size_t t = 0; t < ex.tokens.size(); ++t) {
      out << ex.tokens[t];
      if (t < ex.extra.size())
        for (const std::string& c : ex.extra[t]) out << ' ' << c;
      out << ' ' << ex.tags[t] << '\n';
    }
  }
}

TagAlphabet class_alphabet(const std::vector<ChainExample>& examples) {
  std::set<std::string> names;
  for (const ChainExample& ex : examples) names.insert(ex.tags.begin(), ex.tags.end());
  if (names.empty()) throw InvalidInput("dataset has no tags");
  return TagAlphabet::chain({names.begin(), names.end()});
}

LabelSequence encode_tags(const ChainExample& ex, const TagAlphabet& classes) {
  std::vector<Tag> tags;
  tags.reserve(ex.tags.size());
  for (const std::string& t : ex.tags) tags.push_back(classes.index(t));
  return LabelSequence(std::move(tags));
}

namespace {

std::vector<std::string> split_tab(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

struct LinkRecord {
  std::string id;
  int i = 0;
  int j = 0;
  std::string field;
};

// Parses "id i j field" lines, checking indices against the example's grid.
template <typename F>
void for_each_link(std::istream& in, const std::string& sourceName, const std::map<std::string, std::size_t>& byId,
                   const std::vector<AlignmentExample>& examples, F&& visit) {
  long lineNo = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineNo;
    if (blank(line)) continue;
    const std::vector<std::string> cols = split_ws(line);
    const std::string loc = where(sourceName, lineNo) + ": '" + line + "'";
    if (cols.size() != 4) throw InvalidInput(loc + ": expected 'id i j value'");
    LinkRecord r{cols[0], 0, 0, cols[3]};
    try {
      std::size_t used = 0;
      r.i = std::stoi(cols[1], &used);
      if (used != cols[1].size()) throw std::invalid_argument("i");
      r.j = std::stoi(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("j");
    } catch (const std::exception&) {
      throw InvalidInput(loc + ": indices must be integers");
    }
    auto it = byId.find(r.id);
    if (it == byId.end()) throw InvalidInput(loc + ": unknown sentence id");
    const AlignmentExample& ex = examples[it->second];
    const auto ns = static_cast<int>(ex.input.source.size()), nt = static_cast<int>(ex.input.target.size());
    if (r.i < 1 || r.i > ns || r.j < 1 || r.j > nt) throw InvalidInput(loc + ": index out of range");
    visit(it->second, (r.i - 1) * nt + (r.j - 1), r, loc);
  }
}

}  // namespace

AlignmentCorpus read_alignments(const std::string& sentencePath, const std::string& goldPath,
                                const std::string& scoresPath) {
  std::ifstream sentences = open_input(sentencePath);
  std::ifstream gold, scores;
  if (!goldPath.empty()) gold = open_input(goldPath);
  if (!scoresPath.empty()) scores = open_input(scoresPath);
  return read_alignments(sentences, goldPath.empty() ? nullptr : &gold, scoresPath.empty() ? nullptr : &scores);
}

AlignmentCorpus read_alignments(std::istream& sentences, std::istream* gold, std::istream* scores) {
  AlignmentCorpus corpus;
  std::map<std::string, std::size_t> byId;
  long lineNo = 0;
  for (std::string line; std::getline(sentences, line);) {
    ++lineNo;
    if (blank(line)) continue;
    const std::vector<std::string> cols = split_tab(line);
    const std::string loc = where("sentences", lineNo);
    if (cols.size() != 3) throw InvalidInput(loc + ": expected 'id<TAB>source<TAB>target'");
    AlignmentExample ex;
    ex.id = cols[0];
    ex.input.source = split_ws(cols[1]);
    ex.input.target = split_ws(cols[2]);
    if (ex.id.empty() || ex.input.source.empty() || ex.input.target.empty())
      throw InvalidInput(loc + ": empty id or sentence");
    if (!byId.emplace(ex.id, corpus.examples.size()).second) throw InvalidInput(loc + ": duplicate id '" + ex.id + "'");
    ex.gold = LabelSequence(ex.input.source.size() * ex.input.target.size(), adv::N);
    corpus.examples.push_back(std::move(ex));
  }

  if (gold) {
    std::vector<std::set<int>> seen(corpus.examples.size());
    for_each_link(*gold, "gold", byId, corpus.examples,
                  [&](std::size_t k, int e, const LinkRecord& r, const std::string& loc) {
                    Tag flag;
                    if (r.field == "S")
                      flag = adv::S;
                    else if (r.field == "P")
                      flag = adv::P;
                    else
                      throw InvalidInput(loc + ": flag must be S or P");
                    if (!seen[k].insert(e).second) corpus.warnings.push_back(loc + ": duplicate link, last flag wins");
                    corpus.examples[k].gold[static_cast<std::size_t>(e)] = flag;
                  });
  }

  if (scores) {
    for (AlignmentExample& ex : corpus.examples)
      ex.input.external = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ex.gold.size()));
    for_each_link(*scores, "scores", byId, corpus.examples,
                  [&](std::size_t k, int e, const LinkRecord& r, const std::string& loc) {
                    try {
                      std::size_t used = 0;
                      const double v = std::stod(r.field, &used);
                      if (used != r.field.size() || !std::isfinite(v)) throw std::invalid_argument("score");
                      corpus.examples[k].input.external[e] = v;
                    } catch (const std::exception&) {
                      throw InvalidInput(loc + ": score must be a finite number");
                    }
                  });
  }
  return corpus;
}

namespace {

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t k = 0; k < words.size(); ++k) out += (k ? " " : "") + words[k];
  return out;
}

}  // namespace

void write_alignment_sentences(std::ostream& out, const std::vector<AlignmentExample>& examples) {
  for (const AlignmentExample& ex : examples)
    out << ex.id << '\t' << join(ex.input.source) << '\t' << join(ex.input.target) << '\n';
}

void write_alignment_links(std::ostream& out, const std::vector<AlignmentExample>& examples) {
  for (const AlignmentExample& ex : examples) {
    const auto nt = ex.input.target.size();
    for (std::size_t e = 0; e < ex.gold.size(); ++e)
      if (ex.gold[e] != adv::N)
        out << ex.id << ' ' << e / nt + 1 << ' ' << e % nt + 1 << ' ' << (ex.gold[e] == adv::S ? 'S' : 'P') << '\n';
  }
}

void write_alignment_scores(std::ostream& out, const std::vector<AlignmentExample>& examples) {
  char buf[32];
  for (const AlignmentExample& ex : examples) {
    const auto nt = ex.input.target.size();
    for (Eigen::Index e = 0; e < ex.input.external.size(); ++e) {
      std::snprintf(buf, sizeof buf, "%.17g", ex.input.external[e]);
      out << ex.id << ' ' << static_cast<std::size_t>(e) / nt + 1 << ' ' << static_cast<std::size_t>(e) % nt + 1 << ' '
          << buf << '\n';
    }
  }
}

void write_alignment_prediction(std::ostream& out, const std::string& id, int targetCount, const LabelSequence& pred) {
  for (std::size_t e = 0; e < pred.size(); ++e)
    if (pred[e] == pred::A)
      out << id << ' ' << e / static_cast<std::size_t>(targetCount) + 1 << ' '
          << e % static_cast<std::size_t>(targetCount) + 1 << " A\n";
}

std::vector<LabelSequence> read_alignment_predictions(std::istream& in, const std::vector<AlignmentExample>& reference) {
  std::map<std::string, std::size_t> byId;
  std::vector<LabelSequence> out;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    byId.emplace(reference[k].id, k);
    out.emplace_back(reference[k].gold.size(), pred::N);
  }
  for_each_link(in, "predictions", byId, reference,
                [&](std::size_t k, int e, const LinkRecord& r, const std::string& loc) {
                  if (r.field != "A") throw InvalidInput(loc + ": prediction flag must be A");
                  out[k][static_cast<std::size_t>(e)] = pred::A;
                });
  return out;
}

void write_chain_prediction(std::ostream& out, const LabelSequence& pred, const TagAlphabet& classes) {
  for (std::size_t t = 0; t < pred.size(); ++t) out << (t ? " " : "") << classes.name(pred[t]);
  out << '\n';
}

std::vector<LabelSequence> read_chain_predictions(std::istream& in, const TagAlphabet& classes) {
  std::vector<LabelSequence> out;
  long lineNo = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineNo;
    std::vector<Tag> tags;
    for (const std::string& w : split_ws(line)) {
      if (!classes.contains(w)) throw InvalidInput(where("predictions", lineNo) + ": unknown class '" + w + "'");
      tags.push_back(classes.index(w));
    }
    out.emplace_back(std::move(tags));
  }
  return out;
}

}  // namespace mpg
