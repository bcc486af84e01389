#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "doctest.h"
#include "iumix/rng.hpp"
#include "iumix/tokens.hpp"
#include "iumix/utf8.hpp"

using namespace iumix;

TEST_CASE("utf8 decode handles all sequence lengths") {
  char32_t cp = 0;
  CHECK(utf8::decode("a", 0, cp) == 1);
  CHECK(cp == U'a');
  CHECK(utf8::decode("\xC3\xA9", 0, cp) == 2);  // é
  CHECK(cp == 0xE9);
  CHECK(utf8::decode("\xE1\x90\x83", 0, cp) == 3);  // ᐃ
  CHECK(cp == 0x1403);
  CHECK(utf8::decode("\xF0\x9F\x99\x82", 0, cp) == 4);
  CHECK(cp == 0x1F642);
}

TEST_CASE("utf8 decode rejects malformed input") {
  char32_t cp = 0;
  CHECK(utf8::decode("\x80", 0, cp) == 0);          // bare continuation
  CHECK(utf8::decode("\xC3", 0, cp) == 0);          // truncated
  CHECK(utf8::decode("\xC0\xAF", 0, cp) == 0);      // overlong
  CHECK(utf8::decode("\xE0\x80\xAF", 0, cp) == 0);  // overlong
  CHECK(utf8::decode("\xED\xA0\x80", 0, cp) == 0);  // surrogate
  CHECK(utf8::decode("\xF4\x90\x80\x80", 0, cp) == 0);  // > U+10FFFF
  CHECK(utf8::decode("\xFF", 0, cp) == 0);
}

TEST_CASE("utf8 encode round-trips") {
  for (char32_t cp : {char32_t{0x24}, char32_t{0xA2}, char32_t{0x20AC},
                      char32_t{0x1403}, char32_t{0x10348}, char32_t{0x10FFFF}}) {
    const std::string s = utf8::encode(cp);
    char32_t back = 0;
    CHECK(utf8::decode(s, 0, back) == s.size());
    CHECK(back == cp);
  }
}

TEST_CASE("utf8 validity and codepoint counting") {
  CHECK(utf8::is_valid("nunavut"));
  CHECK(utf8::is_valid("\xE1\x90\x83\xE1\x90\x85"));
  CHECK_FALSE(utf8::is_valid("ok\x80"));
  CHECK(utf8::codepoint_count("abc") == 3);
  CHECK(utf8::codepoint_count("\xE1\x90\x83\x61") == 2);
  CHECK(utf8::codepoint_count("\x80\x80") == 2);  // each bad byte counts once
}

TEST_CASE("utf8 whitespace classification") {
  CHECK(utf8::is_space(U' '));
  CHECK(utf8::is_space(U'\t'));
  CHECK(utf8::is_space(U'\n'));
  CHECK(utf8::is_space(char32_t{0xA0}));
  CHECK(utf8::is_space(char32_t{0x3000}));
  CHECK_FALSE(utf8::is_space(U'a'));
  CHECK_FALSE(utf8::is_space(char32_t{0x200B}));  // zero-width space is not whitespace here
}

TEST_CASE("token iteration splits on unicode whitespace") {
  std::vector<std::string> tokens;
  for_each_token("  a\tbb\xC2\xA0... ", [&](std::string_view t) {
    tokens.emplace_back(t);
  });
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0] == "a");
  CHECK(tokens[1] == "bb");
  CHECK(tokens[2] == "...");
}

TEST_CASE("token stats count tokens and codepoints") {
  const TokenStats stats = token_stats("ab cd\xC3\xA9");
  CHECK(stats.tokens == 2);
  CHECK(stats.chars == 5);  // codepoints in tokens only
  const TokenStats empty = token_stats("   ");
  CHECK(empty.tokens == 0);
  CHECK(empty.chars == 0);
}

TEST_CASE("rng produces pinned splitmix64 stream") {
  Rng rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);
}

TEST_CASE("rng next_below is bounded and deterministic") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t bound = 1 + (static_cast<std::uint64_t>(i) % 17);
    const std::uint64_t va = a.next_below(bound);
    CHECK(va < bound);
    CHECK(va == b.next_below(bound));
  }
}

TEST_CASE("rng shuffle is a deterministic permutation") {
  std::vector<int> v = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Rng rng(7);
  rng.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  std::vector<int> w = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Rng rng2(7);
  rng2.shuffle(w);
  CHECK(v == w);
}

TEST_CASE("fnv1a64 matches published vectors") {
  CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
  CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
  CHECK(fnv1a64("foobar") == 0x85944171F73967E8ULL);
}

TEST_CASE("mix_seed separates nearby inputs") {
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(mix_seed(0, 0) != mix_seed(0, 1));
  CHECK(mix_seed(5, 9) == mix_seed(5, 9));
}
