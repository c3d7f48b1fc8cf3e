#include "treeaug/augment.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace treeaug {

void AugmentConfig::check() const {
  if (!crop && !rotate) throw std::invalid_argument("augment config: no operations selected");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("augment config: p must be in [0,1]");
  if (max_rotations_per_sentence && *max_rotations_per_sentence < 1) {
    throw std::invalid_argument("augment config: max rotations must be positive");
  }
  labels.check();
}

bool is_augmentation_eligible(const Sentence& s) {
  return s.nonstandard_lines.empty() && !s.tokens.empty() && validate_sentence(s).ok();
}

namespace {

// Copies the tokens named by `order` into a fresh sentence with ids 1..m and
// heads remapped. Every kept token's head must itself be kept (or be 0).
Sentence rebuild(const Sentence& src, const std::vector<int>& order) {
  std::unordered_map<int, int> new_id;
  new_id.reserve(order.size());
  for (size_t i = 0; i < order.size(); ++i) {
    new_id[order[i]] = static_cast<int>(i) + 1;
  }
  Sentence out;
  out.tokens.reserve(order.size());
  for (size_t i = 0; i < order.size(); ++i) {
    Token t = src.tokens[static_cast<size_t>(order[i]) - 1];
    t.id = static_cast<int>(i) + 1;
    if (t.head != 0) {
      const auto it = new_id.find(t.head);
      if (it == new_id.end()) {
        throw StructureError("rebuild: head " + std::to_string(t.head) +
                             " of kept token was dropped");
      }
      t.head = it->second;
    }
    out.tokens.push_back(std::move(t));
  }
  return out;
}

std::vector<int> sorted_union(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

uint64_t factorial_checked(int m) {
  // 21! overflows uint64.
  if (m < 0 || m > 20) {
    throw std::overflow_error("factorial of " + std::to_string(m) + " does not fit in 64 bits");
  }
  uint64_t f = 1;
  for (int i = 2; i <= m; ++i) f *= static_cast<uint64_t>(i);
  return f;
}

uint64_t count_orderings(const ChunkDecomposition& d) { return factorial_checked(d.n() + 1); }

std::vector<int> unrank_permutation(uint64_t rank, int m) {
  std::vector<int> avail(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) avail[static_cast<size_t>(i)] = i;
  std::vector<int> out;
  out.reserve(static_cast<size_t>(m));
  for (int i = m; i >= 1; --i) {
    const uint64_t f = factorial_checked(i - 1);
    const auto d = static_cast<size_t>(rank / f);
    rank %= f;
    out.push_back(avail[d]);
    avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return out;
}

Sentence crop(const DepTree& t, int focus_id, const LabelConfig& cfg, bool keep_punct) {
  bool is_focus = false;
  for (const auto& [id, label] : loi_dependents(t, cfg)) {
    if (id == focus_id) {
      is_focus = true;
      break;
    }
  }
  if (!is_focus) {
    throw StructureError("crop: token " + std::to_string(focus_id) +
                         " is not an LOI dependent of the root");
  }
  std::vector<int> kept = sorted_union(subtree_tokens(t, focus_id), root_phrase(t, cfg));
  if (keep_punct) {
    for (int child : t.children[static_cast<size_t>(t.root_id)]) {
      if (base_label(t.token(child).deprel) == "punct") {
        kept = sorted_union(std::move(kept), subtree_tokens(t, child));
      }
    }
  }
  return rebuild(*t.sentence, kept);
}

std::vector<Sentence> all_crops(const DepTree& t, const LabelConfig& cfg, bool keep_punct) {
  std::vector<Sentence> out;
  for (const auto& [id, label] : loi_dependents(t, cfg)) {
    out.push_back(crop(t, id, cfg, keep_punct));
  }
  return out;
}

namespace {

// Chunks in surface order (by first token), the order whose concatenation is
// the identity rotation.
std::vector<const std::vector<int>*> surface_ordered_chunks(const ChunkDecomposition& d) {
  std::vector<const std::vector<int>*> chunks;
  chunks.push_back(&d.root_chunk);
  for (const Chunk& c : d.flexible_chunks) chunks.push_back(&c.ids);
  std::sort(chunks.begin(), chunks.end(),
            [](const std::vector<int>* a, const std::vector<int>* b) {
              return a->front() < b->front();
            });
  return chunks;
}

}  // namespace

std::vector<Sentence> sample_rotations(const DepTree& t, const AugmentConfig& cfg,
                                       RandomStream& rng, std::vector<uint64_t>* ranks_out) {
  const ChunkDecomposition d = extract_chunks(t, cfg.labels);
  const int n = d.n();
  if (ranks_out) ranks_out->clear();
  if (n == 0) return {};

  const uint64_t total = count_orderings(d);  // (n+1)!
  const uint64_t non_identity = total - 1;
  const uint64_t want =
      static_cast<uint64_t>(cfg.max_rotations_per_sentence.value_or(n));
  const uint64_t k = std::min(want, non_identity);

  // Floyd's algorithm: uniform k-subset of ranks {1, ..., total-1}.
  std::set<uint64_t> ranks;
  for (uint64_t j = non_identity - k + 1; j <= non_identity; ++j) {
    const uint64_t r = 1 + uniform_below(rng, j);
    ranks.insert(ranks.count(r) ? j : r);
  }

  const std::vector<const std::vector<int>*> chunks = surface_ordered_chunks(d);
  std::vector<Sentence> out;
  out.reserve(ranks.size());
  for (uint64_t rank : ranks) {
    const std::vector<int> perm = unrank_permutation(rank, n + 1);
    std::vector<int> order;
    order.reserve(t.sentence->tokens.size());
    for (int slot : perm) {
      const std::vector<int>& ids = *chunks[static_cast<size_t>(slot)];
      order.insert(order.end(), ids.begin(), ids.end());
    }
    out.push_back(rebuild(*t.sentence, order));
    if (ranks_out) ranks_out->push_back(rank);
  }
  return out;
}

namespace {

std::string dedup_key(const Sentence& s) {
  std::string key;
  for (const Token& t : s.tokens) {
    key += t.form;
    key += '\x1f';
  }
  key += '\x1e';
  for (const Token& t : s.tokens) {
    key += t.upos;
    key += '\x1f';
  }
  return key;
}

void attach_provenance_comments(Sentence& s, const Provenance& prov) {
  s.comments.clear();
  s.comments.push_back(prov.op == Provenance::Op::crop ? "# augmented = crop"
                                                       : "# augmented = rotate");
  s.comments.push_back("# source_index = " + std::to_string(prov.source_index));
  if (prov.op == Provenance::Op::crop) {
    s.comments.push_back("# focus = " + prov.focus);
  } else {
    s.comments.push_back("# permutation = " + std::to_string(prov.permutation));
  }
  s.comments.push_back(text_comment(s));
}

struct SentenceOutput {
  std::vector<AugmentedSentence> items;
  bool ineligible = false;
  size_t crops = 0;
  size_t rotations = 0;
  size_t duplicates = 0;
};

SentenceOutput augment_one(const Sentence& s, size_t index, const AugmentConfig& cfg) {
  SentenceOutput out;
  if (!is_augmentation_eligible(s)) {
    out.ineligible = true;
    out.items.push_back({s, {Provenance::Op::original, index, "", 0}});
    return out;
  }
  if (cfg.include_originals) {
    out.items.push_back({s, {Provenance::Op::original, index, "", 0}});
  }

  const DepTree tree = build_tree(s);
  RandomStream rng = substream(cfg.seed, index);
  std::unordered_set<std::string> seen;
  auto emit = [&](Sentence&& candidate, Provenance&& prov) {
    if (!seen.insert(dedup_key(candidate)).second) {
      ++out.duplicates;
      return;
    }
    attach_provenance_comments(candidate, prov);
    if (prov.op == Provenance::Op::crop) {
      ++out.crops;
    } else {
      ++out.rotations;
    }
    out.items.push_back({std::move(candidate), std::move(prov)});
  };

  if (cfg.crop) {
    for (const auto& [focus, label] : loi_dependents(tree, cfg.labels)) {
      if (!bernoulli(rng, cfg.p)) continue;
      emit(crop(tree, focus, cfg.labels, cfg.keep_punct),
           {Provenance::Op::crop, index, label, 0});
    }
  }
  if (cfg.rotate) {
    std::vector<uint64_t> ranks;
    std::vector<Sentence> rotations = sample_rotations(tree, cfg, rng, &ranks);
    for (size_t i = 0; i < rotations.size(); ++i) {
      if (!bernoulli(rng, cfg.p)) continue;
      emit(std::move(rotations[i]), {Provenance::Op::rotate, index, "", ranks[i]});
    }
  }
  return out;
}

std::vector<AugmentedSentence> collect(std::vector<SentenceOutput>& per_sentence,
                                       size_t input_count, DatasetStats* stats) {
  std::vector<AugmentedSentence> out;
  DatasetStats tally;
  tally.input_sentences = input_count;
  for (SentenceOutput& so : per_sentence) {
    if (so.ineligible) ++tally.ineligible;
    tally.crops += so.crops;
    tally.rotations += so.rotations;
    tally.duplicates_dropped += so.duplicates;
    for (AugmentedSentence& item : so.items) {
      if (item.provenance.op == Provenance::Op::original) ++tally.originals;
      out.push_back(std::move(item));
    }
  }
  if (stats) *stats = tally;
  return out;
}

}  // namespace

std::vector<AugmentedSentence> augment_dataset_serial(const std::vector<Sentence>& sentences,
                                                      const AugmentConfig& cfg,
                                                      DatasetStats* stats) {
  cfg.check();
  std::vector<SentenceOutput> per_sentence(sentences.size());
  for (size_t i = 0; i < sentences.size(); ++i) {
    per_sentence[i] = augment_one(sentences[i], i, cfg);
  }
  return collect(per_sentence, sentences.size(), stats);
}

std::vector<AugmentedSentence> augment_dataset(const std::vector<Sentence>& sentences,
                                               const AugmentConfig& cfg, DatasetStats* stats) {
  cfg.check();
  std::vector<SentenceOutput> per_sentence(sentences.size());
  const auto count = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    per_sentence[static_cast<size_t>(i)] =
        augment_one(sentences[static_cast<size_t>(i)], static_cast<size_t>(i), cfg);
  }
  return collect(per_sentence, sentences.size(), stats);
}

}  // namespace treeaug
