// CoNLL-U reading, validation and writing.
//
// Input is UTF-8 text, LF or CRLF, ten tab-separated columns per token line,
// one blank line after each sentence. Multiword-token ranges ("1-2") and
// empty nodes ("1.1") are preserved verbatim with their position so that
// serialization reproduces the input byte for byte (after newline
// normalization); sentences carrying them are not augmented because token
// reindexing has no defined semantics for such lines.

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace treeaug {

// One syntactic word, i.e. one regular 10-column row.
struct Token {
  int id = 0;  // 1-based surface position
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  std::string feats;
  int head = 0;  // 0 = attached to the artificial root
  std::string deprel;
  std::string deps;
  std::string misc;
};

// A preserved multiword-token or empty-node line. after_token is the number
// of regular token lines seen before it, which pins its output position.
struct RawLine {
  int after_token = 0;
  std::string text;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<std::string> comments;
  std::vector<RawLine> nonstandard_lines;
};

struct Violation {
  enum class Kind { contiguity, head_range, root_count, cycle };
  Kind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

class SerializeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws ParseError on malformed lines (wrong column count, bad id/head).
// Tree-level problems such as an out-of-range head do not throw; they are
// reported by validate_sentence on the returned sentence.
std::vector<Sentence> parse_conllu(std::istream& in);
std::vector<Sentence> parse_conllu(const std::string& text);
std::vector<Sentence> read_conllu_file(const std::string& path);

// Checks: ids are exactly 1..n in order, heads in [0, n], exactly one token
// with head 0, and every head chain reaches the root.
ValidationReport validate_sentence(const Sentence& s);

// Formats one sentence; performs no validity checking.
void serialize_sentence(const Sentence& s, std::string& out);

// With validate=true (the default) refuses invalid sentences, naming the
// violated invariant. Pass validate=false to round-trip sentences that were
// parsed from a file regardless of their tree structure.
std::string serialize_conllu(const std::vector<Sentence>& sentences, bool validate = true);
void write_conllu_file(const std::string& path, const std::vector<Sentence>& sentences,
                       bool validate = true);

// "# text = ..." comment regenerated from token forms.
std::string text_comment(const Sentence& s);

}  // namespace treeaug
