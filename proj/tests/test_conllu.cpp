#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "treeaug/conllu.hpp"
#include "treeaug/rng.hpp"

using namespace treeaug;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) {
  return std::string(TREEAUG_FIXTURE_DIR) + "/" + name;
}

const std::string kTiny =
    "# text = ava beto\n"
    "1\tava\t_\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
    "2\tbeto\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "\n";

}  // namespace

TEST_CASE("parses tokens, comments and columns") {
  const std::vector<Sentence> ss = parse_conllu(kTiny);
  REQUIRE(ss.size() == 1);
  const Sentence& s = ss[0];
  REQUIRE(s.tokens.size() == 2);
  CHECK(s.comments == std::vector<std::string>{"# text = ava beto"});
  CHECK(s.tokens[0].id == 1);
  CHECK(s.tokens[0].form == "ava");
  CHECK(s.tokens[0].upos == "NOUN");
  CHECK(s.tokens[0].head == 2);
  CHECK(s.tokens[0].deprel == "nsubj");
  CHECK(s.tokens[1].head == 0);
}

TEST_CASE("missing trailing blank line is tolerated") {
  const std::string no_blank = kTiny.substr(0, kTiny.size() - 1);
  REQUIRE(parse_conllu(no_blank).size() == 1);
}

TEST_CASE("multiword tokens and empty nodes are preserved with position") {
  const std::vector<Sentence> ss = read_conllu_file(fixture("roundtrip.conllu"));
  REQUIRE(ss.size() == 3);
  CHECK(ss[0].tokens.size() == 5);
  REQUIRE(ss[0].nonstandard_lines.size() == 2);
  CHECK(ss[0].nonstandard_lines[0].after_token == 0);  // "1-2" ahead of token 1
  CHECK(ss[0].nonstandard_lines[1].after_token == 2);  // "3-4" after token 2
  CHECK(ss[0].nonstandard_lines[0].text.substr(0, 3) == "1-2");
  REQUIRE(ss[1].nonstandard_lines.size() == 1);
  CHECK(ss[1].nonstandard_lines[0].after_token == 5);  // empty node "5.1"
}

TEST_CASE("round trip is byte-identical on every bundled file") {
  namespace fs = std::filesystem;
  size_t checked = 0;
  for (const char* dir : {TREEAUG_FIXTURE_DIR, TREEAUG_DATA_DIR}) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() != ".conllu") continue;
      const std::string original = slurp(entry.path().string());
      const std::string rebuilt = serialize_conllu(parse_conllu(original), false);
      CHECK_MESSAGE(rebuilt == original, entry.path().string());
      ++checked;
    }
  }
  CHECK(checked >= 8);
}

TEST_CASE("CRLF input normalizes to LF output") {
  std::string crlf = kTiny;
  size_t pos = 0;
  while ((pos = crlf.find('\n', pos)) != std::string::npos) {
    crlf.replace(pos, 1, "\r\n");
    pos += 2;
  }
  const std::vector<Sentence> ss = parse_conllu(crlf);
  REQUIRE(ss.size() == 1);
  CHECK(ss[0].tokens[1].form == "beto");
  CHECK(serialize_conllu(ss, false) == kTiny);
}

TEST_CASE("UTF-8 BOM is stripped") {
  const std::vector<Sentence> ss = parse_conllu("\xEF\xBB\xBF" + kTiny);
  REQUIRE(ss.size() == 1);
  CHECK(ss[0].comments[0] == "# text = ava beto");
}

TEST_CASE("parse errors carry the line number") {
  // 9 columns
  CHECK_THROWS_AS(parse_conllu("1\tx\t_\tNOUN\t_\t_\t0\troot\t_\n\n"), ParseError);
  // non-integer id
  CHECK_THROWS_AS(parse_conllu("one\tx\t_\tX\t_\t_\t0\troot\t_\t_\n\n"), ParseError);
  // non-integer head
  CHECK_THROWS_AS(parse_conllu("1\tx\t_\tX\t_\t_\tzero\troot\t_\t_\n\n"), ParseError);
  // negative head
  CHECK_THROWS_AS(parse_conllu("1\tx\t_\tX\t_\t_\t-1\troot\t_\t_\n\n"), ParseError);
  // comment after a token line, inside the sentence
  CHECK_THROWS_AS(parse_conllu("1\tx\t_\tX\t_\t_\t0\troot\t_\t_\n# late\n\n"), ParseError);

  try {
    parse_conllu("# ok\n1\tx\t_\tX\t_\t_\t0\troot\t_\t_\nbroken line\n\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("validate_sentence reports tree-level problems") {
  auto first = [](const std::string& text) { return parse_conllu(text).at(0); };

  SUBCASE("valid") { CHECK(validate_sentence(first(kTiny)).ok()); }

  SUBCASE("id gap") {
    const Sentence s = first(
        "1\ta\t_\tX\t_\t_\t3\tdep\t_\t_\n"
        "3\tb\t_\tX\t_\t_\t0\troot\t_\t_\n\n");
    const ValidationReport r = validate_sentence(s);
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations[0].kind == Violation::Kind::contiguity);
  }

  SUBCASE("head out of range") {
    const Sentence s = first("1\ta\t_\tX\t_\t_\t9\tdep\t_\t_\n\n");
    bool found = false;
    for (const Violation& v : validate_sentence(s).violations) {
      found = found || v.kind == Violation::Kind::head_range;
    }
    CHECK(found);
  }

  SUBCASE("no root") {
    const Sentence s = first(
        "1\ta\t_\tX\t_\t_\t2\tdep\t_\t_\n"
        "2\tb\t_\tX\t_\t_\t1\tdep\t_\t_\n\n");
    bool root_count = false;
    bool cycle = false;
    for (const Violation& v : validate_sentence(s).violations) {
      root_count = root_count || v.kind == Violation::Kind::root_count;
      cycle = cycle || v.kind == Violation::Kind::cycle;
    }
    CHECK(root_count);
    CHECK(cycle);  // 1 -> 2 -> 1 never reaches the root
  }

  SUBCASE("multiple roots") {
    const Sentence s = first(
        "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n"
        "2\tb\t_\tX\t_\t_\t0\troot\t_\t_\n\n");
    REQUIRE_FALSE(validate_sentence(s).ok());
    CHECK(validate_sentence(s).violations[0].kind == Violation::Kind::root_count);
  }
}

TEST_CASE("strict serialization refuses invalid trees and names the problem") {
  const std::vector<Sentence> bad = parse_conllu(
      "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n"
      "2\tb\t_\tX\t_\t_\t0\troot\t_\t_\n\n");
  CHECK_THROWS_WITH_AS(serialize_conllu(bad), doctest::Contains("multiple roots"),
                       SerializeError);
  CHECK_NOTHROW(serialize_conllu(bad, false));
}

TEST_CASE("text_comment joins forms with single spaces") {
  const Sentence s = parse_conllu(kTiny).at(0);
  CHECK(text_comment(s) == "# text = ava beto");
}

TEST_CASE("fuzzing the parser never crashes it") {
  RandomStream rng = substream(99, 0);
  const std::string seedtext = slurp(fixture("roundtrip.conllu"));
  for (int iter = 0; iter < 300; ++iter) {
    std::string input;
    if (iter % 2 == 0) {
      // random bytes
      const size_t len = uniform_below(rng, 400);
      input.reserve(len);
      for (size_t i = 0; i < len; ++i) {
        input.push_back(static_cast<char>(uniform_below(rng, 256)));
      }
    } else {
      // mutated valid file
      input = seedtext;
      const size_t edits = 1 + uniform_below(rng, 8);
      for (size_t e = 0; e < edits && !input.empty(); ++e) {
        const size_t at = uniform_below(rng, input.size());
        switch (uniform_below(rng, 3)) {
          case 0: input[at] = static_cast<char>(uniform_below(rng, 256)); break;
          case 1: input.erase(at, 1); break;
          default: input.insert(at, 1, static_cast<char>(uniform_below(rng, 256)));
        }
      }
    }
    try {
      const std::vector<Sentence> ss = parse_conllu(input);
      for (const Sentence& s : ss) validate_sentence(s);
    } catch (const ParseError&) {
      // rejecting malformed input is the expected path
    }
  }
}
