#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "treeaug/conllu.hpp"
#include "treeaug/deptree.hpp"

namespace treeaug {

// Treebank-level summary used by the stats command and the experiment driver.
struct CorpusStats {
  size_t sentences = 0;
  size_t tokens = 0;   // syntactic words; multiword-token ranges are not counted
  size_t invalid = 0;  // sentences whose tree fails validation
  std::map<int, size_t> loi_histogram;  // root LOI dependents -> sentence count

  // Size filters for augmentation experiments: corpora under 5K tokens are
  // too small to train on, corpora of 120K tokens or more gain too little.
  bool eligible() const { return tokens >= 5000 && tokens < 120000; }
  std::string bucket() const;  // "<20K", "<80K", "<120K" or ">=120K"
};

CorpusStats corpus_stats(const std::vector<Sentence>& sentences,
                         const LabelConfig& labels = LabelConfig{});

// Sample Pearson correlation coefficient. Throws std::invalid_argument
// ("undefined correlation") for fewer than two pairs, mismatched lengths,
// or zero variance in either variable.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// FNV-1a, used to assert that files an experiment must not touch stay put.
uint64_t fnv1a(const std::string& bytes);

}  // namespace treeaug
