#include "treeaug/deptree.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "treeaug/text.hpp"

namespace treeaug {

std::string base_label(const std::string& deprel) {
  const size_t colon = deprel.find(':');
  return colon == std::string::npos ? deprel : deprel.substr(0, colon);
}

namespace {

std::string canonical(const std::map<std::string, std::string>& aliases, const std::string& label) {
  const auto it = aliases.find(label);
  return it == aliases.end() ? label : it->second;
}

}  // namespace

std::string LabelConfig::loi_label(const std::string& deprel) const {
  const std::string key = match_subtypes ? base_label(deprel) : deprel;
  const std::string canon = canonical(aliases, key);
  return loi.count(canon) ? canon : std::string();
}

bool LabelConfig::is_root_phrase(const std::string& deprel) const {
  const std::string key = match_subtypes ? base_label(deprel) : deprel;
  return root_phrase.count(canonical(aliases, key)) != 0;
}

void LabelConfig::check() const {
  if (loi.empty()) throw std::invalid_argument("label config: loi set is empty");
  if (root_phrase.empty()) throw std::invalid_argument("label config: root_phrase set is empty");
  for (const auto& s : loi) {
    if (s.find(':') != std::string::npos) {
      throw std::invalid_argument("label config: loi label '" + s + "' contains ':'");
    }
  }
  for (const auto& s : root_phrase) {
    if (s.find(':') != std::string::npos) {
      throw std::invalid_argument("label config: root_phrase label '" + s + "' contains ':'");
    }
  }
}

LabelConfig LabelConfig::parse(std::istream& in) {
  LabelConfig cfg;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("label config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "loi" || key == "root_phrase") {
      std::set<std::string> labels;
      for (const std::string& item : split(value, ',')) {
        const std::string label = trim(item);
        if (!label.empty()) labels.insert(label);
      }
      (key == "loi" ? cfg.loi : cfg.root_phrase) = std::move(labels);
    } else if (key == "match_subtypes") {
      if (value == "true" || value == "1") {
        cfg.match_subtypes = true;
      } else if (value == "false" || value == "0") {
        cfg.match_subtypes = false;
      } else {
        throw std::invalid_argument("label config line " + std::to_string(line_no) +
                                    ": match_subtypes must be true or false");
      }
    } else if (key == "aliases") {
      cfg.aliases.clear();
      for (const std::string& item : split(value, ',')) {
        const std::string pair = trim(item);
        if (pair.empty()) continue;
        const size_t sep = pair.find('=');
        if (sep == std::string::npos) {
          throw std::invalid_argument("label config line " + std::to_string(line_no) +
                                      ": alias must be old=new");
        }
        cfg.aliases[trim(pair.substr(0, sep))] = trim(pair.substr(sep + 1));
      }
    } else {
      throw std::invalid_argument("label config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
  cfg.check();
  return cfg;
}

LabelConfig LabelConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse(in);
}

DepTree build_tree(const Sentence& s) {
  const ValidationReport report = validate_sentence(s);
  if (!report.ok()) {
    throw StructureError("cannot build tree: " + report.summary());
  }
  if (s.tokens.empty()) {
    throw StructureError("cannot build tree: sentence is empty");
  }
  DepTree t;
  t.sentence = &s;
  t.children.assign(s.tokens.size() + 1, {});
  for (const Token& tok : s.tokens) {
    if (tok.head == 0) {
      t.root_id = tok.id;
    } else {
      t.children[static_cast<size_t>(tok.head)].push_back(tok.id);
    }
  }
  return t;
}

std::vector<int> subtree_tokens(const DepTree& t, int id) {
  if (id < 1 || id > t.size()) {
    throw StructureError("subtree_tokens: unknown token id " + std::to_string(id));
  }
  std::vector<int> out;
  std::vector<int> stack = {id};
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    out.push_back(cur);
    for (int child : t.children[static_cast<size_t>(cur)]) stack.push_back(child);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<int, std::string>> loi_dependents(const DepTree& t,
                                                        const LabelConfig& cfg) {
  std::vector<std::pair<int, std::string>> out;
  for (int child : t.children[static_cast<size_t>(t.root_id)]) {
    const std::string label = cfg.loi_label(t.token(child).deprel);
    if (!label.empty()) out.emplace_back(child, label);
  }
  return out;
}

std::vector<int> root_phrase(const DepTree& t, const LabelConfig& cfg) {
  std::vector<int> out;
  std::vector<int> stack = {t.root_id};
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    out.push_back(cur);
    for (int child : t.children[static_cast<size_t>(cur)]) {
      if (cfg.is_root_phrase(t.token(child).deprel)) stack.push_back(child);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ChunkDecomposition extract_chunks(const DepTree& t, const LabelConfig& cfg) {
  ChunkDecomposition d;
  std::vector<bool> in_flexible(static_cast<size_t>(t.size()) + 1, false);
  for (const auto& [id, label] : loi_dependents(t, cfg)) {
    Chunk chunk;
    chunk.relation = label;
    chunk.ids = subtree_tokens(t, id);
    for (int tok : chunk.ids) in_flexible[static_cast<size_t>(tok)] = true;
    d.flexible_chunks.push_back(std::move(chunk));
  }
  for (int id = 1; id <= t.size(); ++id) {
    if (!in_flexible[static_cast<size_t>(id)]) d.root_chunk.push_back(id);
  }
  return d;
}

}  // namespace treeaug
