#include "treeaug/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace treeaug {

std::string CorpusStats::bucket() const {
  if (tokens < 20000) return "<20K";
  if (tokens < 80000) return "<80K";
  if (tokens < 120000) return "<120K";
  return ">=120K";
}

CorpusStats corpus_stats(const std::vector<Sentence>& sentences, const LabelConfig& labels) {
  CorpusStats st;
  st.sentences = sentences.size();
  for (const Sentence& s : sentences) {
    st.tokens += s.tokens.size();
    if (s.tokens.empty() || !validate_sentence(s).ok()) {
      ++st.invalid;
      continue;
    }
    const DepTree tree = build_tree(s);
    ++st.loi_histogram[static_cast<int>(loi_dependents(tree, labels).size())];
  }
  return st;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("undefined correlation: need at least two (x, y) pairs");
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument("undefined correlation: zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace treeaug
