#include <algorithm>
#include <cstdio>
#include <sstream>

#include "mpg/data_io.hpp"

namespace mpg {

double ClassScore::f1() const {
  const long denom = 2 * truePositive + falsePositive + falseNegative;
  return denom == 0 ? 1.0 : 2.0 * static_cast<double>(truePositive) / static_cast<double>(denom);
}

EvalReport evaluate_chain(const std::vector<LabelSequence>& predicted, const std::vector<LabelSequence>& gold,
                          const TagAlphabet& classes) {
  if (predicted.size() != gold.size())
    throw InvalidInput("evaluate: " + std::to_string(predicted.size()) + " predictions for " +
                       std::to_string(gold.size()) + " gold sequences");
  EvalReport r;
  r.chain = true;
  r.examples = static_cast<long>(gold.size());
  for (Tag c = 0; c < classes.size(); ++c) r.classes.push_back({classes.name(c)});
  for (std::size_t k = 0; k < gold.size(); ++k) {
    if (predicted[k].size() != gold[k].size())
      throw InvalidInput("evaluate: length mismatch in sequence " + std::to_string(k + 1));
    validate(predicted[k], classes);
    validate(gold[k], classes);
    for (std::size_t t = 0; t < gold[k].size(); ++t) {
      const Tag p = predicted[k][t], g = gold[k][t];
      if (p == g) {
        ++r.classes[static_cast<std::size_t>(p)].truePositive;
      } else {
        ++r.classes[static_cast<std::size_t>(p)].falsePositive;
        ++r.classes[static_cast<std::size_t>(g)].falseNegative;
      }
    }
  }
  return r;
}

EvalReport evaluate_alignment(const std::vector<LabelSequence>& predicted, const std::vector<LabelSequence>& gold) {
  if (predicted.size() != gold.size())
    throw InvalidInput("evaluate: " + std::to_string(predicted.size()) + " predictions for " +
                       std::to_string(gold.size()) + " gold grids");
  EvalReport r;
  r.chain = false;
  r.examples = static_cast<long>(gold.size());
  for (std::size_t k = 0; k < gold.size(); ++k) {
    if (predicted[k].size() != gold[k].size())
      throw InvalidInput("evaluate: grid size mismatch in example " + std::to_string(k + 1));
    r.aer += aer_counts(predicted[k], gold[k]);
  }
  return r;
}

std::string EvalReport::format() const {
  std::ostringstream out;
  char buf[160];
  if (chain) {
    std::size_t width = 5;
    for (const ClassScore& c : classes) width = std::max(width, c.name.size());
    std::snprintf(buf, sizeof buf, "%-*s %8s %8s %8s %10s\n", static_cast<int>(width), "class", "tp", "fp", "fn", "f1");
    out << buf;
    for (const ClassScore& c : classes) {
      std::snprintf(buf, sizeof buf, "%-*s %8ld %8ld %8ld %10.6f\n", static_cast<int>(width), c.name.c_str(),
                    c.truePositive, c.falsePositive, c.falseNegative, c.f1());
      out << buf;
    }
    out << "\nexamples=" << examples << '\n';
    for (const ClassScore& c : classes) {
      std::snprintf(buf, sizeof buf, "f1.%s=%.17g\n", c.name.c_str(), c.f1());
      out << buf;
    }
  } else {
    std::snprintf(buf, sizeof buf, "%-10s %8s %8s %8s %8s %10s\n", "corpus", "|A&S|", "|A&P|", "|A|", "|S|", "aer");
    out << buf;
    std::snprintf(buf, sizeof buf, "%-10s %8ld %8ld %8ld %8ld %10.6f\n", "all", aer.matchSure, aer.matchPossible,
                  aer.predicted, aer.sure, aer.aer());
    out << buf;
    out << "\nexamples=" << examples << '\n';
    std::snprintf(buf, sizeof buf, "aer=%.17g\n", aer.aer());
    out << buf;
    out << "match_sure=" << aer.matchSure << "\nmatch_possible=" << aer.matchPossible
        << "\npredicted=" << aer.predicted << "\nsure=" << aer.sure << '\n';
  }
  return out.str();
}

}  // namespace mpg
