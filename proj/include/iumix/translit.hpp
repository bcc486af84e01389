#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace iumix {

struct TranslitEntry {
  char32_t syllabic;
  std::string roman;
};

// Syllabics <-> roman. An apostrophe is inserted between adjacent romanized
// units whenever greedy decoding would otherwise split the junction
// differently, so deromanize(romanize(s)) == s for any pure-syllabics s.
// Unmapped characters pass through in both directions and carry no such
// guarantee.
class TranslitTable {
 public:
  // Validates: non-empty roman strings, no apostrophes, injective both ways.
  explicit TranslitTable(std::vector<TranslitEntry> entries);

  // ICI romanization of the Inuktitut UCAS subset.
  static const TranslitTable& builtin();

  // Two-column text: codepoint (U+XXXX or hex), whitespace, roman string.
  // '#' lines and blank lines are skipped.
  static TranslitTable from_file(const std::string& path);

  std::string romanize(std::string_view text) const;
  std::string deromanize(std::string_view text) const;

  const std::vector<TranslitEntry>& entries() const { return entries_; }

 private:
  struct Node {
    std::int32_t child[256];
    char32_t terminal;  // 0 when no word ends here
  };

  std::size_t longest_match(std::string_view text, std::size_t pos, char32_t& cp) const;

  std::vector<TranslitEntry> entries_;
  std::unordered_map<char32_t, std::uint32_t> to_roman_;
  std::vector<Node> trie_;
  std::size_t max_roman_len_ = 0;
};

inline std::string romanize(std::string_view text) {
  return TranslitTable::builtin().romanize(text);
}

inline std::string deromanize(std::string_view text) {
  return TranslitTable::builtin().deromanize(text);
}

}  // namespace iumix
