#pragma once

#include <cstdint>
#include <string_view>

#include "iumix/utf8.hpp"

namespace iumix {

// Calls fn(word) for every maximal run of non-whitespace codepoints.
// Words are views into text; bytes that fail to decode are treated as
// single non-space characters.
template <typename F>
void for_each_token(std::string_view text, F&& fn) {
  std::size_t pos = 0;
  std::size_t word_start = 0;
  bool in_word = false;
  while (pos < text.size()) {
    char32_t cp = 0;
    std::size_t n = utf8::decode(text, pos, cp);
    if (n == 0) {
      cp = 0xFFFD;
      n = 1;
    }
    if (utf8::is_space(cp)) {
      if (in_word) {
        fn(text.substr(word_start, pos - word_start));
        in_word = false;
      }
    } else if (!in_word) {
      word_start = pos;
      in_word = true;
    }
    pos += n;
  }
  if (in_word) fn(text.substr(word_start));
}

struct TokenStats {
  std::uint64_t tokens = 0;
  std::uint64_t chars = 0;  // codepoints over all tokens
};

inline TokenStats token_stats(std::string_view text) {
  TokenStats st;
  for_each_token(text, [&](std::string_view word) {
    ++st.tokens;
    st.chars += utf8::codepoint_count(word);
  });
  return st;
}

}  // namespace iumix
