#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace iumix::utf8 {

// Decodes the codepoint starting at s[pos] into cp and returns the number
// of bytes consumed. Returns 0 on malformed input (truncated sequences,
// overlong encodings, surrogates, values beyond U+10FFFF).
std::size_t decode(std::string_view s, std::size_t pos, char32_t& cp);

void append(std::string& out, char32_t cp);

std::string encode(char32_t cp);

bool is_valid(std::string_view s);

// Codepoint count; a byte that does not decode counts as one.
std::size_t codepoint_count(std::string_view s);

// Unicode whitespace, the separator set for whitespace tokenization.
bool is_space(char32_t cp);

}  // namespace iumix::utf8
