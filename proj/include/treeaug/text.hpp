// UTF-8 and codepoint helpers shared by the corpus reader and the tagger.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace treeaug {

// Decodes UTF-8 into codepoints. Invalid byte sequences decode to U+FFFD
// instead of failing; corpus files are untrusted input.
std::vector<uint32_t> utf8_decode(std::string_view s);

std::string utf8_encode(const std::vector<uint32_t>& cps);

// Offset-table lowercasing for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic. Not full Unicode case folding; used only to normalize tagger
// input, so unmapped scripts pass through unchanged.
uint32_t lower_codepoint(uint32_t cp);

std::vector<std::string> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string trim(std::string_view s);

}  // namespace treeaug
