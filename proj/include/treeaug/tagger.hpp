// Character-level bidirectional-LSTM POS tagger, built from scratch.
//
// Each word is lowercased, wrapped in start/end symbols and composed into a
// word vector by a character bi-LSTM (final state of each direction, mapped
// through a linear layer). A second bi-LSTM runs over the word vectors and a
// softmax over the concatenated hidden states yields per-token tag
// probabilities. Training is per-sentence SGD with gradient clipping,
// dropout, learning-rate halving on dev plateau and early stopping.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "treeaug/conllu.hpp"
#include "treeaug/lstm.hpp"
#include "treeaug/rng.hpp"

namespace treeaug {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaggerConfig {
  int char_embed_dim = 200;
  int char_hidden_dim = 200;  // per direction
  int word_embed_dim = 200;
  int word_hidden_dim = 200;  // per direction
  double init_range = 0.1;    // parameters start uniform in (-r, +r)
  double lr_initial = 1.0;
  double dropout_rate = 0.5;
  double clip_norm = 5.0;  // global norm; 0 disables clipping
  int early_stop_patience = 3;
  int max_epochs = 100;
  uint64_t seed = 1;
  // Training-time regularization of the unknown-character embedding:
  // characters seen exactly once in training data are replaced by the
  // unknown symbol with this probability. Set unk_replace=false to disable.
  bool unk_replace = true;
  double unk_replace_prob = 0.1;

  void check() const;
};

// Sentinel codepoints wrapped around every word before the character LSTM.
// Unicode noncharacters, so they cannot collide with real text.
constexpr uint32_t kBowChar = 0xFFF0;
constexpr uint32_t kEowChar = 0xFFF1;

// Lowercases every codepoint and wraps the sequence in kBowChar/kEowChar.
// Idempotent: already-wrapped input is returned unchanged apart from
// lowercasing (a no-op the second time).
std::vector<uint32_t> preprocess_word(const std::vector<uint32_t>& cps);
std::vector<uint32_t> preprocess_word(const std::string& form);

struct CharVocab {
  static constexpr int kUnk = 0;
  static constexpr int kBow = 1;
  static constexpr int kEow = 2;

  std::vector<uint32_t> index_to_char;  // [0]=U+FFFD, [1]=BOW, [2]=EOW, then corpus chars
  std::unordered_map<uint32_t, int> char_to_index;
  std::vector<uint8_t> rare;  // 1 for characters seen exactly once in training

  int size() const { return static_cast<int>(index_to_char.size()); }
  int lookup(uint32_t cp) const {
    const auto it = char_to_index.find(cp);
    return it == char_to_index.end() ? kUnk : it->second;
  }
};

struct TagVocab {
  std::vector<std::string> index_to_tag;  // lexicographic; ties in argmax break low
  std::map<std::string, int> tag_to_index;

  int size() const { return static_cast<int>(index_to_tag.size()); }
  int lookup(const std::string& tag) const {
    const auto it = tag_to_index.find(tag);
    return it == tag_to_index.end() ? -1 : it->second;
  }
};

struct TaggerTensors {
  Matrix char_embed;              // Vc x Dc
  LstmParams char_fwd, char_bwd;  // character level
  Matrix comp_fwd, comp_bwd;      // Dw x Hc, word composition from final states
  Vector comp_bias;               // Dw
  LstmParams word_fwd, word_bwd;  // word level
  Matrix out_w;                   // T x 2Hw
  Vector out_b;                   // T
};

struct TensorView {
  const char* name;
  double* data;
  size_t size;
  int rows;
  int cols;  // 1 for vectors
};

// Stable, name-addressed list of every parameter tensor; the same order is
// used for SGD, clipping, gradient checks and checkpoints.
std::vector<TensorView> tensor_views(TaggerTensors& t);

struct TaggerModel {
  TaggerConfig config;
  CharVocab chars;
  TagVocab tags;
  TaggerTensors params;
};

// Builds vocabularies from the training set and initializes all parameters
// uniformly in (-init_range, +init_range) from substream(seed, 0).
TaggerModel init_model(const TaggerConfig& cfg, const std::vector<Sentence>& train_set);

TaggerTensors zero_like(const TaggerModel& m);

// Forward traces kept for the backward pass.
struct WordTrace {
  std::vector<int> char_ids;      // after any unknown-character replacement
  std::vector<Vector> inputs;     // char embeddings in surface order
  LstmTrace fwd, bwd;             // bwd ran over reversed inputs
  Vector composed;                // pre-dropout word vector
};

struct SentenceTrace {
  std::vector<WordTrace> words;
  std::vector<Vector> word_mask;  // inverted-dropout masks; empty at inference
  std::vector<Vector> word_vecs;  // post-dropout, input to the word bi-LSTM
  LstmTrace word_fwd, word_bwd;
  std::vector<Vector> feat_mask;
  std::vector<Vector> feats;      // post-dropout [h_f;h_b] per token
  std::vector<Vector> probs;
};

// Per-token tag distributions. train_rng enables dropout and rare-character
// replacement; pass nullptr for inference. trace may be null when no
// backward pass will follow.
std::vector<Vector> tagger_forward(const TaggerModel& m, const Sentence& s,
                                   SentenceTrace* trace, RandomStream* train_rng);

// Inference-mode forward (no dropout).
std::vector<Vector> encode_and_predict(const TaggerModel& m, const Sentence& s);

// Composed word vector for a single form (inference mode).
Vector compose_word(const TaggerModel& m, const std::string& form);

// Lowest index wins ties.
int argmax(const Vector& v);

// -sum(log p[gold]); probabilities below 1e-12 are clamped, and each clamp
// increments *clamped when given.
double nll_loss(const std::vector<Vector>& probs, const std::vector<int>& gold,
                long* clamped = nullptr);

// Exact gradients of nll_loss wrt every tensor, accumulated into grads.
void backward(const TaggerModel& m, const SentenceTrace& trace, const std::vector<int>& gold,
              TaggerTensors& grads);

// Clips the global gradient norm to clip_norm, then applies theta -= lr * g.
// Throws TrainingError on non-finite gradients.
void sgd_step(TaggerModel& m, TaggerTensors& grads, double lr, double clip_norm);

struct EpochStats {
  int epoch;
  double train_loss;  // mean per-sentence NLL
  double dev_score;
  double lr;  // rate in effect during the epoch
};

struct EvalResult {
  size_t correct = 0;
  size_t total = 0;
  size_t unknown_gold = 0;  // gold tags outside the model vocabulary; counted wrong
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

using DevScorer = std::function<double(const TaggerModel&, const std::vector<Sentence>&)>;

struct TrainResult {
  TaggerModel model;  // parameters at the best dev score
  std::vector<EpochStats> history;
  long clamped_probs = 0;
};

// Per-sentence SGD in seeded shuffled order. After each epoch the dev scorer
// runs (token accuracy by default); on non-improvement the learning rate
// halves, and after early_stop_patience consecutive non-improvements
// training stops.
TrainResult train(const std::vector<Sentence>& train_set, const std::vector<Sentence>& dev_set,
                  const TaggerConfig& cfg, DevScorer dev_scorer = {});

// Token accuracy with dropout disabled. The parallel variant shards
// sentences across threads; counts are integers, so it is bit-identical to
// the serial reference.
EvalResult evaluate(const TaggerModel& m, const std::vector<Sentence>& test_set);
EvalResult evaluate_serial(const TaggerModel& m, const std::vector<Sentence>& test_set);

// Checkpoint container: magic "TREEAUGCKPT1", a JSON header describing
// config, vocabularies and tensor shapes, then raw float64 tensor data.
void save_checkpoint(const TaggerModel& m, const std::string& path);
TaggerModel load_checkpoint(const std::string& path);

std::string history_tsv(const std::vector<EpochStats>& history);

}  // namespace treeaug
