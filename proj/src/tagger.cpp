#include "treeaug/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "treeaug/text.hpp"

namespace treeaug {

void TaggerConfig::check() const {
  if (char_embed_dim < 1 || char_hidden_dim < 1 || word_embed_dim < 1 || word_hidden_dim < 1) {
    throw std::invalid_argument("tagger config: dimensions must be positive");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw std::invalid_argument("tagger config: dropout_rate must be in [0,1)");
  }
  if (lr_initial <= 0.0) throw std::invalid_argument("tagger config: lr_initial must be > 0");
  if (clip_norm < 0.0) throw std::invalid_argument("tagger config: clip_norm must be >= 0");
  if (early_stop_patience < 1) {
    throw std::invalid_argument("tagger config: early_stop_patience must be positive");
  }
  if (max_epochs < 1) throw std::invalid_argument("tagger config: max_epochs must be positive");
  if (unk_replace_prob < 0.0 || unk_replace_prob > 1.0) {
    throw std::invalid_argument("tagger config: unk_replace_prob must be in [0,1]");
  }
}

std::vector<uint32_t> preprocess_word(const std::vector<uint32_t>& cps) {
  std::vector<uint32_t> out;
  const bool wrapped = cps.size() >= 2 && cps.front() == kBowChar && cps.back() == kEowChar;
  out.reserve(cps.size() + (wrapped ? 0 : 2));
  if (!wrapped) out.push_back(kBowChar);
  for (uint32_t cp : cps) out.push_back(lower_codepoint(cp));
  if (!wrapped) out.push_back(kEowChar);
  return out;
}

std::vector<uint32_t> preprocess_word(const std::string& form) {
  return preprocess_word(utf8_decode(form));
}

std::vector<TensorView> tensor_views(TaggerTensors& t) {
  std::vector<TensorView> v;
  auto mat = [&](const char* name, Matrix& m) {
    v.push_back({name, m.a.data(), m.a.size(), m.rows, m.cols});
  };
  auto vec = [&](const char* name, Vector& x) {
    v.push_back({name, x.data(), x.size(), static_cast<int>(x.size()), 1});
  };
  mat("char_embed", t.char_embed);
  mat("char_fwd.wx", t.char_fwd.wx);
  mat("char_fwd.wh", t.char_fwd.wh);
  vec("char_fwd.b", t.char_fwd.b);
  mat("char_bwd.wx", t.char_bwd.wx);
  mat("char_bwd.wh", t.char_bwd.wh);
  vec("char_bwd.b", t.char_bwd.b);
  mat("comp_fwd", t.comp_fwd);
  mat("comp_bwd", t.comp_bwd);
  vec("comp_bias", t.comp_bias);
  mat("word_fwd.wx", t.word_fwd.wx);
  mat("word_fwd.wh", t.word_fwd.wh);
  vec("word_fwd.b", t.word_fwd.b);
  mat("word_bwd.wx", t.word_bwd.wx);
  mat("word_bwd.wh", t.word_bwd.wh);
  vec("word_bwd.b", t.word_bwd.b);
  mat("out_w", t.out_w);
  vec("out_b", t.out_b);
  return v;
}

namespace {

TaggerTensors allocate_tensors(const TaggerConfig& cfg, int char_vocab, int tag_vocab) {
  TaggerTensors t;
  t.char_embed = Matrix(char_vocab, cfg.char_embed_dim);
  t.char_fwd = LstmParams(cfg.char_embed_dim, cfg.char_hidden_dim);
  t.char_bwd = LstmParams(cfg.char_embed_dim, cfg.char_hidden_dim);
  t.comp_fwd = Matrix(cfg.word_embed_dim, cfg.char_hidden_dim);
  t.comp_bwd = Matrix(cfg.word_embed_dim, cfg.char_hidden_dim);
  t.comp_bias.assign(static_cast<size_t>(cfg.word_embed_dim), 0.0);
  t.word_fwd = LstmParams(cfg.word_embed_dim, cfg.word_hidden_dim);
  t.word_bwd = LstmParams(cfg.word_embed_dim, cfg.word_hidden_dim);
  t.out_w = Matrix(tag_vocab, 2 * cfg.word_hidden_dim);
  t.out_b.assign(static_cast<size_t>(tag_vocab), 0.0);
  return t;
}

}  // namespace

TaggerModel init_model(const TaggerConfig& cfg, const std::vector<Sentence>& train_set) {
  cfg.check();
  if (train_set.empty()) {
    throw TrainingError("cannot build vocabularies from an empty training set");
  }

  std::map<uint32_t, size_t> char_counts;  // ordered for deterministic indices
  std::set<std::string> tag_set;
  for (const Sentence& s : train_set) {
    for (const Token& tok : s.tokens) {
      tag_set.insert(tok.upos);
      for (uint32_t cp : preprocess_word(tok.form)) {
        if (cp == kBowChar || cp == kEowChar) continue;
        ++char_counts[cp];
      }
    }
  }

  TaggerModel m;
  m.config = cfg;
  m.chars.index_to_char = {0xFFFD, kBowChar, kEowChar};
  m.chars.rare = {0, 0, 0};
  m.chars.char_to_index[kBowChar] = CharVocab::kBow;
  m.chars.char_to_index[kEowChar] = CharVocab::kEow;
  for (const auto& [cp, count] : char_counts) {
    m.chars.char_to_index[cp] = m.chars.size();
    m.chars.index_to_char.push_back(cp);
    m.chars.rare.push_back(count == 1 ? 1 : 0);
  }
  for (const std::string& tag : tag_set) {
    m.tags.tag_to_index[tag] = m.tags.size();
    m.tags.index_to_tag.push_back(tag);
  }

  m.params = allocate_tensors(cfg, m.chars.size(), m.tags.size());
  RandomStream rng = substream(cfg.seed, 0);
  for (TensorView& view : tensor_views(m.params)) {
    for (size_t i = 0; i < view.size; ++i) {
      view.data[i] = uniform_real(rng, -cfg.init_range, cfg.init_range);
    }
  }
  return m;
}

TaggerTensors zero_like(const TaggerModel& m) {
  return allocate_tensors(m.config, m.chars.size(), m.tags.size());
}

namespace {

void softmax_inplace(Vector& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

std::vector<Vector> reversed(const std::vector<Vector>& xs) {
  return std::vector<Vector>(xs.rbegin(), xs.rend());
}

}  // namespace

std::vector<Vector> tagger_forward(const TaggerModel& m, const Sentence& s,
                                   SentenceTrace* trace, RandomStream* train_rng) {
  if (s.tokens.empty()) throw TrainingError("cannot tag an empty sentence");
  const TaggerConfig& cfg = m.config;
  const size_t n = s.tokens.size();
  const bool dropout = train_rng != nullptr && cfg.dropout_rate > 0.0;
  const double keep_prob = 1.0 - cfg.dropout_rate;

  SentenceTrace local;
  SentenceTrace& tr = trace ? *trace : local;
  tr = SentenceTrace{};
  tr.words.resize(n);

  for (size_t t = 0; t < n; ++t) {
    WordTrace& wt = tr.words[t];
    for (uint32_t cp : preprocess_word(s.tokens[t].form)) {
      int id = m.chars.lookup(cp);
      if (train_rng && cfg.unk_replace && id >= 3 && m.chars.rare[static_cast<size_t>(id)] &&
          bernoulli(*train_rng, cfg.unk_replace_prob)) {
        id = CharVocab::kUnk;
      }
      wt.char_ids.push_back(id);
    }
    wt.inputs.resize(wt.char_ids.size());
    for (size_t i = 0; i < wt.char_ids.size(); ++i) {
      const double* row =
          &m.params.char_embed.a[static_cast<size_t>(wt.char_ids[i]) * cfg.char_embed_dim];
      wt.inputs[i].assign(row, row + cfg.char_embed_dim);
    }
    wt.fwd = lstm_forward(m.params.char_fwd, wt.inputs);
    wt.bwd = lstm_forward(m.params.char_bwd, reversed(wt.inputs));

    Vector from_fwd, from_bwd;
    matvec(m.params.comp_fwd, wt.fwd.h.back(), from_fwd);
    matvec(m.params.comp_bwd, wt.bwd.h.back(), from_bwd);
    wt.composed.resize(static_cast<size_t>(cfg.word_embed_dim));
    for (size_t j = 0; j < wt.composed.size(); ++j) {
      wt.composed[j] = from_fwd[j] + from_bwd[j] + m.params.comp_bias[j];
    }
  }

  tr.word_vecs.resize(n);
  if (dropout) tr.word_mask.resize(n);
  for (size_t t = 0; t < n; ++t) {
    if (dropout) {
      Vector& mask = tr.word_mask[t];
      mask.resize(static_cast<size_t>(cfg.word_embed_dim));
      tr.word_vecs[t].resize(mask.size());
      for (size_t j = 0; j < mask.size(); ++j) {
        mask[j] = bernoulli(*train_rng, keep_prob) ? 1.0 / keep_prob : 0.0;
        tr.word_vecs[t][j] = tr.words[t].composed[j] * mask[j];
      }
    } else {
      tr.word_vecs[t] = tr.words[t].composed;
    }
  }

  tr.word_fwd = lstm_forward(m.params.word_fwd, tr.word_vecs);
  tr.word_bwd = lstm_forward(m.params.word_bwd, reversed(tr.word_vecs));

  const auto h_dim = static_cast<size_t>(cfg.word_hidden_dim);
  tr.feats.resize(n);
  if (dropout) tr.feat_mask.resize(n);
  tr.probs.resize(n);
  for (size_t t = 0; t < n; ++t) {
    Vector feat(2 * h_dim);
    const Vector& hf = tr.word_fwd.h[t];
    const Vector& hb = tr.word_bwd.h[n - 1 - t];
    std::copy(hf.begin(), hf.end(), feat.begin());
    std::copy(hb.begin(), hb.end(), feat.begin() + static_cast<std::ptrdiff_t>(h_dim));
    if (dropout) {
      Vector& mask = tr.feat_mask[t];
      mask.resize(feat.size());
      for (size_t j = 0; j < feat.size(); ++j) {
        mask[j] = bernoulli(*train_rng, keep_prob) ? 1.0 / keep_prob : 0.0;
        feat[j] *= mask[j];
      }
    }
    tr.feats[t] = std::move(feat);

    Vector logits;
    matvec(m.params.out_w, tr.feats[t], logits);
    for (size_t j = 0; j < logits.size(); ++j) logits[j] += m.params.out_b[j];
    softmax_inplace(logits);
    tr.probs[t] = std::move(logits);
  }
  return tr.probs;
}

std::vector<Vector> encode_and_predict(const TaggerModel& m, const Sentence& s) {
  return tagger_forward(m, s, nullptr, nullptr);
}

Vector compose_word(const TaggerModel& m, const std::string& form) {
  Sentence s;
  Token t;
  t.id = 1;
  t.form = form;
  t.head = 0;
  t.deprel = "root";
  s.tokens.push_back(std::move(t));
  SentenceTrace trace;
  tagger_forward(m, s, &trace, nullptr);
  return trace.words.front().composed;
}

int argmax(const Vector& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[static_cast<size_t>(i)] > v[static_cast<size_t>(best)]) best = i;
  }
  return best;
}

double nll_loss(const std::vector<Vector>& probs, const std::vector<int>& gold, long* clamped) {
  if (probs.size() != gold.size()) {
    throw std::invalid_argument("nll_loss: probs and gold lengths differ");
  }
  double loss = 0.0;
  for (size_t t = 0; t < probs.size(); ++t) {
    double p = probs[t][static_cast<size_t>(gold[t])];
    if (p < 1e-12) {
      p = 1e-12;
      if (clamped) ++*clamped;
    }
    loss -= std::log(p);
  }
  return loss;
}

void backward(const TaggerModel& m, const SentenceTrace& trace, const std::vector<int>& gold,
              TaggerTensors& grads) {
  const TaggerConfig& cfg = m.config;
  const size_t n = trace.probs.size();
  if (gold.size() != n) throw std::invalid_argument("backward: gold length mismatch");
  const auto h_dim = static_cast<size_t>(cfg.word_hidden_dim);
  const bool dropout = !trace.word_mask.empty();

  // Softmax + NLL: dlogits = p - onehot(gold).
  std::vector<Vector> dh_fwd(n, Vector(h_dim, 0.0));
  std::vector<Vector> dh_bwd(n, Vector(h_dim, 0.0));
  for (size_t t = 0; t < n; ++t) {
    Vector dlogits = trace.probs[t];
    dlogits[static_cast<size_t>(gold[t])] -= 1.0;
    add_outer(grads.out_w, dlogits, trace.feats[t]);
    add_inplace(grads.out_b, dlogits);

    Vector dfeat(2 * h_dim, 0.0);
    matvec_transpose_add(m.params.out_w, dlogits, dfeat);
    if (dropout) {
      for (size_t j = 0; j < dfeat.size(); ++j) dfeat[j] *= trace.feat_mask[t][j];
    }
    for (size_t j = 0; j < h_dim; ++j) {
      dh_fwd[t][j] = dfeat[j];
      dh_bwd[n - 1 - t][j] = dfeat[h_dim + j];  // reversed-run step for token t
    }
  }

  const std::vector<Vector> word_rev = reversed(trace.word_vecs);
  const std::vector<Vector> dx_fwd =
      lstm_backward(m.params.word_fwd, trace.word_vecs, trace.word_fwd, dh_fwd, grads.word_fwd);
  const std::vector<Vector> dx_bwd =
      lstm_backward(m.params.word_bwd, word_rev, trace.word_bwd, dh_bwd, grads.word_bwd);

  for (size_t t = 0; t < n; ++t) {
    Vector dcomposed(static_cast<size_t>(cfg.word_embed_dim));
    for (size_t j = 0; j < dcomposed.size(); ++j) {
      double g = dx_fwd[t][j] + dx_bwd[n - 1 - t][j];
      if (dropout) g *= trace.word_mask[t][j];
      dcomposed[j] = g;
    }

    const WordTrace& wt = trace.words[t];
    add_outer(grads.comp_fwd, dcomposed, wt.fwd.h.back());
    add_outer(grads.comp_bwd, dcomposed, wt.bwd.h.back());
    add_inplace(grads.comp_bias, dcomposed);

    const size_t len = wt.inputs.size();
    std::vector<Vector> dh_cf(len, Vector(static_cast<size_t>(cfg.char_hidden_dim), 0.0));
    std::vector<Vector> dh_cb(len, Vector(static_cast<size_t>(cfg.char_hidden_dim), 0.0));
    matvec_transpose_add(m.params.comp_fwd, dcomposed, dh_cf[len - 1]);
    matvec_transpose_add(m.params.comp_bwd, dcomposed, dh_cb[len - 1]);

    const std::vector<Vector> char_rev = reversed(wt.inputs);
    const std::vector<Vector> dc_fwd =
        lstm_backward(m.params.char_fwd, wt.inputs, wt.fwd, dh_cf, grads.char_fwd);
    const std::vector<Vector> dc_bwd =
        lstm_backward(m.params.char_bwd, char_rev, wt.bwd, dh_cb, grads.char_bwd);

    for (size_t i = 0; i < len; ++i) {
      double* row =
          &grads.char_embed.a[static_cast<size_t>(wt.char_ids[i]) * cfg.char_embed_dim];
      for (int j = 0; j < cfg.char_embed_dim; ++j) {
        row[j] += dc_fwd[i][static_cast<size_t>(j)] + dc_bwd[len - 1 - i][static_cast<size_t>(j)];
      }
    }
  }
}

void sgd_step(TaggerModel& m, TaggerTensors& grads, double lr, double clip_norm) {
  const std::vector<TensorView> gv = tensor_views(grads);
  double sq = 0.0;
  for (const TensorView& view : gv) {
    for (size_t i = 0; i < view.size; ++i) sq += view.data[i] * view.data[i];
  }
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) {
    throw TrainingError("non-finite gradient norm");
  }
  const double scale = (clip_norm > 0.0 && norm > clip_norm) ? clip_norm / norm : 1.0;

  const std::vector<TensorView> pv = tensor_views(m.params);
  for (size_t k = 0; k < pv.size(); ++k) {
    for (size_t i = 0; i < pv[k].size; ++i) {
      pv[k].data[i] -= lr * scale * gv[k].data[i];
    }
  }
}

TrainResult train(const std::vector<Sentence>& train_set, const std::vector<Sentence>& dev_set,
                  const TaggerConfig& cfg, DevScorer dev_scorer) {
  cfg.check();
  if (train_set.empty()) throw TrainingError("empty training set");
  if (dev_set.empty()) throw TrainingError("empty development set");
  if (!dev_scorer) {
    dev_scorer = [](const TaggerModel& m, const std::vector<Sentence>& dev) {
      return evaluate(m, dev).accuracy();
    };
  }

  TrainResult result;
  TaggerModel model = init_model(cfg, train_set);

  std::vector<std::vector<int>> gold(train_set.size());
  for (size_t i = 0; i < train_set.size(); ++i) {
    for (const Token& t : train_set[i].tokens) {
      gold[i].push_back(model.tags.lookup(t.upos));
    }
  }

  RandomStream rng = substream(cfg.seed, 1);
  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), size_t{0});

  double lr = cfg.lr_initial;
  double best_score = 0.0;
  TaggerModel best_model = model;
  int bad_epochs = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle(order, rng);
    double loss_sum = 0.0;
    size_t seen = 0;
    for (size_t idx : order) {
      const Sentence& s = train_set[idx];
      if (s.tokens.empty()) continue;
      SentenceTrace trace;
      const std::vector<Vector> probs = tagger_forward(model, s, &trace, &rng);
      const double loss = nll_loss(probs, gold[idx], &result.clamped_probs);
      if (!std::isfinite(loss)) {
        std::fprintf(stderr, "treeaug: epoch %d aborted: non-finite loss at sentence %zu\n",
                     epoch, idx);
        break;
      }
      TaggerTensors grads = zero_like(model);
      backward(model, trace, gold[idx], grads);
      try {
        sgd_step(model, grads, lr, cfg.clip_norm);
      } catch (const TrainingError& e) {
        std::fprintf(stderr, "treeaug: epoch %d aborted at sentence %zu: %s\n", epoch, idx,
                     e.what());
        break;
      }
      loss_sum += loss;
      ++seen;
    }

    const double dev_score = dev_scorer(model, dev_set);
    result.history.push_back({epoch, seen > 0 ? loss_sum / static_cast<double>(seen) : 0.0,
                              dev_score, lr});
    if (dev_score > best_score) {
      best_score = dev_score;
      best_model = model;
      bad_epochs = 0;
    } else {
      ++bad_epochs;
      lr *= 0.5;
      if (bad_epochs >= cfg.early_stop_patience) break;
    }
  }

  result.model = std::move(best_model);
  return result;
}

namespace {

EvalResult evaluate_impl(const TaggerModel& m, const std::vector<Sentence>& test_set,
                         bool parallel) {
  if (test_set.empty()) throw TrainingError("empty evaluation set");
  const auto count = static_cast<std::ptrdiff_t>(test_set.size());
  size_t correct = 0;
  size_t total = 0;
  size_t unknown = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : correct, total, unknown) \
    if (parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const Sentence& s = test_set[static_cast<size_t>(i)];
    if (s.tokens.empty()) continue;
    const std::vector<Vector> probs = encode_and_predict(m, s);
    for (size_t t = 0; t < s.tokens.size(); ++t) {
      const int gold = m.tags.lookup(s.tokens[t].upos);
      ++total;
      if (gold < 0) {
        ++unknown;
        continue;
      }
      if (argmax(probs[t]) == gold) ++correct;
    }
  }
  return {correct, total, unknown};
}

}  // namespace

EvalResult evaluate(const TaggerModel& m, const std::vector<Sentence>& test_set) {
  return evaluate_impl(m, test_set, true);
}

EvalResult evaluate_serial(const TaggerModel& m, const std::vector<Sentence>& test_set) {
  return evaluate_impl(m, test_set, false);
}

}  // namespace treeaug
