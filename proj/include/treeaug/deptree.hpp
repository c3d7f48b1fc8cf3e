// Head-indexed tree view over a sentence and the structural pieces both
// augmentation operators are built from: LOI dependents of the root, the
// root-phrase closure, subtree spans, and the chunk decomposition.

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "treeaug/conllu.hpp"

namespace treeaug {

class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Which dependency labels mark flexible chunks (loi) and which glue a
// multi-token predicate together (root_phrase). Base labels only, no
// ":subtype" suffixes; with match_subtypes a label matches all its subtypes.
// Aliases map legacy labels onto current ones ("dobj" -> "obj" by default).
struct LabelConfig {
  std::set<std::string> loi = {"nsubj", "obj", "iobj", "obl"};
  std::set<std::string> root_phrase = {"fixed", "flat", "cop", "compound"};
  bool match_subtypes = true;
  std::map<std::string, std::string> aliases = {{"dobj", "obj"}};

  // Canonical LOI label for a deprel ("" when it is not an LOI).
  std::string loi_label(const std::string& deprel) const;
  bool is_loi(const std::string& deprel) const { return !loi_label(deprel).empty(); }
  bool is_root_phrase(const std::string& deprel) const;

  // Throws std::invalid_argument when a set is empty or a base label
  // contains ':'.
  void check() const;

  // Plain-text "key = value" files; keys loi, root_phrase, match_subtypes,
  // aliases. Lists are comma-separated, aliases are old=new pairs.
  static LabelConfig from_file(const std::string& path);
  static LabelConfig parse(std::istream& in);
};

std::string base_label(const std::string& deprel);

struct DepTree {
  const Sentence* sentence = nullptr;
  // children[id] lists the dependents of token id in surface order;
  // children[0] is unused. Inverse of the head relation.
  std::vector<std::vector<int>> children;
  int root_id = 0;

  const Token& token(int id) const { return sentence->tokens[static_cast<size_t>(id) - 1]; }
  int size() const { return static_cast<int>(sentence->tokens.size()); }
};

// Requires a sentence that passes validate_sentence; throws StructureError
// naming the violation otherwise. The tree only views the sentence, so the
// sentence must outlive it; the rvalue overload is deleted to keep
// temporaries out.
DepTree build_tree(const Sentence& s);
DepTree build_tree(Sentence&& s) = delete;

// id plus all descendants, ascending surface order.
std::vector<int> subtree_tokens(const DepTree& t, int id);

// Direct dependents of the root whose deprel is an LOI, in surface order,
// together with the canonical LOI label. First tree level only.
std::vector<std::pair<int, std::string>> loi_dependents(const DepTree& t, const LabelConfig& cfg);

// Transitive closure from the root over root_phrase-labeled child edges,
// root included, ascending surface order.
std::vector<int> root_phrase(const DepTree& t, const LabelConfig& cfg);

struct Chunk {
  std::string relation;   // canonical LOI label
  std::vector<int> ids;   // ascending surface order
};

// Disjoint cover of all token ids: one flexible chunk per LOI dependent
// (its whole subtree), everything else in the root chunk.
struct ChunkDecomposition {
  std::vector<int> root_chunk;
  std::vector<Chunk> flexible_chunks;
  int n() const { return static_cast<int>(flexible_chunks.size()); }
};

ChunkDecomposition extract_chunks(const DepTree& t, const LabelConfig& cfg);

}  // namespace treeaug
