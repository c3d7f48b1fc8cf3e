#include "treeaug/conllu.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "treeaug/text.hpp"

namespace treeaug {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// "2-4" multiword range or "1.1" empty node.
bool is_nonstandard_id(std::string_view s) {
  const size_t dash = s.find('-');
  if (dash != std::string_view::npos) {
    return all_digits(s.substr(0, dash)) && all_digits(s.substr(dash + 1));
  }
  const size_t dot = s.find('.');
  if (dot != std::string_view::npos) {
    return all_digits(s.substr(0, dot)) && all_digits(s.substr(dot + 1));
  }
  return false;
}

int parse_int(std::string_view s, size_t line_no, const char* what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line_no, std::string(what) + " is not an integer: '" + std::string(s) + "'");
  }
  return value;
}

const char* violation_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::contiguity: return "contiguity";
    case Violation::Kind::head_range: return "head out of range";
    case Violation::Kind::root_count: return "root count";
    case Violation::Kind::cycle: return "cycle";
  }
  return "unknown";
}

}  // namespace

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.detail;
  }
  return out;
}

std::vector<Sentence> parse_conllu(std::istream& in) {
  std::vector<Sentence> sentences;
  Sentence cur;
  bool pending = false;
  size_t line_no = 0;
  std::string line;

  auto flush = [&]() {
    if (!pending) return;
    if (cur.tokens.empty()) {
      throw ParseError(line_no, "sentence has no token lines");
    }
    sentences.push_back(std::move(cur));
    cur = Sentence();
    pending = false;
  };

  bool first_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first_line) {
      // Strip a UTF-8 BOM if present.
      if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF') {
        line.erase(0, 3);
      }
      first_line = false;
    }

    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      if (!cur.tokens.empty()) {
        throw ParseError(line_no, "comment line inside a sentence");
      }
      cur.comments.push_back(line);
      pending = true;
      continue;
    }

    const std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError(line_no, "expected 10 tab-separated columns, got " +
                                    std::to_string(cols.size()));
    }

    if (is_nonstandard_id(cols[0])) {
      cur.nonstandard_lines.push_back({static_cast<int>(cur.tokens.size()), line});
      pending = true;
      continue;
    }

    Token t;
    t.id = parse_int(cols[0], line_no, "token id");
    if (t.id < 1) throw ParseError(line_no, "token id must be >= 1");
    t.form = cols[1];
    t.lemma = cols[2];
    t.upos = cols[3];
    t.xpos = cols[4];
    t.feats = cols[5];
    t.head = parse_int(cols[6], line_no, "head");
    if (t.head < 0) throw ParseError(line_no, "head must be >= 0");
    t.deprel = cols[7];
    t.deps = cols[8];
    t.misc = cols[9];
    cur.tokens.push_back(std::move(t));
    pending = true;
  }
  ++line_no;
  flush();
  return sentences;
}

std::vector<Sentence> parse_conllu(const std::string& text) {
  std::istringstream in(text);
  return parse_conllu(in);
}

std::vector<Sentence> read_conllu_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_conllu(in);
}

ValidationReport validate_sentence(const Sentence& s) {
  ValidationReport report;
  const int n = static_cast<int>(s.tokens.size());

  bool contiguous = true;
  for (int i = 0; i < n; ++i) {
    if (s.tokens[i].id != i + 1) {
      report.violations.push_back({Violation::Kind::contiguity,
                                   "token ids are not 1.." + std::to_string(n) +
                                       " (position " + std::to_string(i + 1) + " has id " +
                                       std::to_string(s.tokens[i].id) + ")"});
      contiguous = false;
      break;
    }
  }

  int roots = 0;
  bool heads_ok = true;
  for (const Token& t : s.tokens) {
    if (t.head == 0) ++roots;
    if (t.head < 0 || t.head > n) {
      report.violations.push_back({Violation::Kind::head_range,
                                   "head out of range: token " + std::to_string(t.id) +
                                       " has head " + std::to_string(t.head)});
      heads_ok = false;
    }
  }
  if (roots == 0 && n > 0) {
    report.violations.push_back({Violation::Kind::root_count, "no root"});
  } else if (roots > 1) {
    report.violations.push_back({Violation::Kind::root_count, "multiple roots"});
  }

  // Cycle check only makes sense once ids and heads are sane.
  if (contiguous && heads_ok) {
    for (int start = 1; start <= n; ++start) {
      int cur = start;
      int steps = 0;
      while (cur != 0 && steps <= n) {
        cur = s.tokens[cur - 1].head;
        ++steps;
      }
      if (cur != 0) {
        report.violations.push_back({Violation::Kind::cycle,
                                     "head chain from token " + std::to_string(start) +
                                         " never reaches the root"});
        break;
      }
    }
  }
  return report;
}

void serialize_sentence(const Sentence& s, std::string& out) {
  for (const std::string& c : s.comments) {
    out += c;
    out += '\n';
  }
  size_t raw = 0;
  const int n = static_cast<int>(s.tokens.size());
  for (int k = 0; k <= n; ++k) {
    while (raw < s.nonstandard_lines.size() && s.nonstandard_lines[raw].after_token == k) {
      out += s.nonstandard_lines[raw].text;
      out += '\n';
      ++raw;
    }
    if (k == n) break;
    const Token& t = s.tokens[k];
    out += std::to_string(t.id);
    out += '\t';
    out += t.form;
    out += '\t';
    out += t.lemma;
    out += '\t';
    out += t.upos;
    out += '\t';
    out += t.xpos;
    out += '\t';
    out += t.feats;
    out += '\t';
    out += std::to_string(t.head);
    out += '\t';
    out += t.deprel;
    out += '\t';
    out += t.deps;
    out += '\t';
    out += t.misc;
    out += '\n';
  }
  out += '\n';
}

std::string serialize_conllu(const std::vector<Sentence>& sentences, bool validate) {
  std::string out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (validate) {
      const ValidationReport report = validate_sentence(sentences[i]);
      if (!report.ok()) {
        throw SerializeError("sentence " + std::to_string(i) + " is invalid (" +
                             std::string(violation_name(report.violations.front().kind)) +
                             "): " + report.summary());
      }
    }
    serialize_sentence(sentences[i], out);
  }
  return out;
}

void write_conllu_file(const std::string& path, const std::vector<Sentence>& sentences,
                       bool validate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << serialize_conllu(sentences, validate);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string text_comment(const Sentence& s) {
  std::string text = "# text = ";
  for (size_t i = 0; i < s.tokens.size(); ++i) {
    if (i > 0) text += ' ';
    text += s.tokens[i].form;
  }
  return text;
}

}  // namespace treeaug
