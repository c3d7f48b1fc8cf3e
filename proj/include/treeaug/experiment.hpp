#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treeaug/augment.hpp"
#include "treeaug/conllu.hpp"
#include "treeaug/tagger.hpp"

namespace treeaug {

// One training condition: the untouched baseline ("org") or an augmentation
// operation applied to the training set at probability p.
struct ExperimentSetting {
  std::string name;  // "org", "crop@0.3", "rotate@1", ...
  bool crop = false;
  bool rotate = false;
  double p = 0.0;

  bool is_baseline() const { return !crop && !rotate; }
};

// org plus {crop, rotate} x {0.3, 0.7, 1.0}: seven settings.
std::vector<ExperimentSetting> default_grid();

struct ExperimentRow {
  std::string setting;
  size_t train_sentences = 0;
  size_t train_tokens = 0;
  double accuracy = 0.0;  // mean over runs; 0 when failed
  double seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;  // same order as the grid
  double improvement_pct = 0.0;     // (best augmented - org) / org * 100
  uint64_t seed = 0;
  int runs = 1;
  uint64_t dev_checksum = 0;   // FNV-1a of the serialized dev set
  uint64_t test_checksum = 0;  // likewise for test; neither may change

  const ExperimentRow* baseline() const;
};

// Trains one tagger per setting (augmenting only the training data), scores
// each on the untouched test set, and reports mean accuracies. A failing
// setting is recorded in its row; the remaining settings still run. Run r
// offsets both the augmentation seed and the tagger seed by r - 1.
ExperimentReport run_experiment(const std::vector<Sentence>& train,
                                const std::vector<Sentence>& dev,
                                const std::vector<Sentence>& test,
                                const std::vector<ExperimentSetting>& grid,
                                const TaggerConfig& tagger_cfg, const AugmentConfig& aug_cfg,
                                int runs = 1);

std::string report_tsv(const ExperimentReport& report);
std::string report_table(const ExperimentReport& report);

}  // namespace treeaug
