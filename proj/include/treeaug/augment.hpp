// Crop and rotate augmentation over dependency trees.
//
// Crop keeps one LOI subtree plus the root phrase and drops everything else,
// yielding a smaller sentence. Rotate permutes whole chunks (the n LOI
// subtrees and the root chunk) and concatenates them in the drawn order.
// Every output is reindexed to ids 1..m with heads remapped, so it is a
// valid sentence in its own right. Outputs may be ungrammatical; they are
// emitted as-is.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treeaug/conllu.hpp"
#include "treeaug/deptree.hpp"
#include "treeaug/rng.hpp"

namespace treeaug {

enum class AugmentOp { crop, rotate };

struct AugmentConfig {
  bool crop = true;
  bool rotate = true;
  double p = 1.0;        // per-candidate keep probability
  uint64_t seed = 1;
  // Rotations sampled per sentence; defaults to n (the LOI chunk count).
  std::optional<int> max_rotations_per_sentence;
  LabelConfig labels;
  bool include_originals = true;
  // Keep root-attached punctuation subtrees in crops instead of dropping them.
  bool keep_punct = false;

  void check() const;
};

struct Provenance {
  enum class Op { original, crop, rotate };
  Op op = Op::original;
  size_t source_index = 0;
  std::string focus;         // crop: canonical LOI label of the focus
  uint64_t permutation = 0;  // rotate: rank of the chunk ordering
};

struct AugmentedSentence {
  Sentence sentence;
  Provenance provenance;
};

struct DatasetStats {
  size_t input_sentences = 0;
  size_t originals = 0;
  size_t crops = 0;
  size_t rotations = 0;
  size_t ineligible = 0;
  size_t duplicates_dropped = 0;
};

// A sentence can be augmented when it is structurally valid and carries no
// multiword-token or empty-node lines (those have no reindexing semantics).
bool is_augmentation_eligible(const Sentence& s);

// Keeps subtree(focus) plus the root phrase (plus root-attached punctuation
// when keep_punct); original surface order, reindexed. focus_id must be an
// LOI dependent of the root.
Sentence crop(const DepTree& t, int focus_id, const LabelConfig& cfg, bool keep_punct = false);

// One crop per LOI dependent, in surface order of the foci.
std::vector<Sentence> all_crops(const DepTree& t, const LabelConfig& cfg,
                                bool keep_punct = false);

// (n+1)! for n flexible chunks. Throws std::overflow_error when the result
// does not fit in 64 bits (n >= 20; unreachable for real sentences).
uint64_t count_orderings(const ChunkDecomposition& d);

// Draws k = min(max_rotations_per_sentence or n, (n+1)!-1) distinct chunk
// orderings uniformly without replacement, identity excluded, and
// materializes each. Ranks of the drawn orderings are reported through
// `ranks` when given (ascending; rank 0 is the identity).
std::vector<Sentence> sample_rotations(const DepTree& t, const AugmentConfig& cfg,
                                       RandomStream& rng,
                                       std::vector<uint64_t>* ranks = nullptr);

// Whole-dataset driver. Each candidate instance (each crop, each sampled
// rotation) is kept with one Bernoulli(p) draw from a per-sentence substream
// keyed on (seed, sentence index), so the parallel driver reproduces the
// serial output exactly. Originals come first per sentence when
// include_originals; ineligible sentences are always copied unchanged.
// Synthetic duplicates within one source sentence are dropped.
std::vector<AugmentedSentence> augment_dataset(const std::vector<Sentence>& sentences,
                                               const AugmentConfig& cfg,
                                               DatasetStats* stats = nullptr);
// Reference implementation; same contract, no threading.
std::vector<AugmentedSentence> augment_dataset_serial(const std::vector<Sentence>& sentences,
                                                      const AugmentConfig& cfg,
                                                      DatasetStats* stats = nullptr);

// Permutation of [0, m) with the given Lehmer rank; rank 0 is the identity.
std::vector<int> unrank_permutation(uint64_t rank, int m);

uint64_t factorial_checked(int m);

}  // namespace treeaug
