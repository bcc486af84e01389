#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "iumix/bpe.hpp"
#include "iumix/rng.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace iumix;

namespace {

const std::string kMarker = kDefaultBpeMarker;

WordFreq freq(std::initializer_list<std::pair<const char*, std::uint64_t>> items) {
  WordFreq words;
  for (const auto& [word, count] : items) words[word] = count;
  return words;
}

std::vector<std::pair<std::string, std::string>> merge_pairs(const BpeModel& model) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& m : model.merges) out.emplace_back(m.left, m.right);
  return out;
}

}  // namespace

TEST_CASE("learn_bpe reproduces the classic word table") {
  const WordFreq words =
      freq({{"low", 5}, {"lower", 2}, {"newest", 6}, {"widest", 3}});
  const BpeModel model = learn_bpe(words, 4);
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"e", "s"}, {"es", "t"}, {"est", kMarker}, {"l", "o"}};
  CHECK(merge_pairs(model) == expected);
}

TEST_CASE("learn_bpe stops when no pair repeats") {
  const BpeModel model = learn_bpe(freq({{"aaaa", 1}}), 10);
  const std::vector<std::pair<std::string, std::string>> expected = {{"a", "a"}};
  CHECK(merge_pairs(model) == expected);
}

TEST_CASE("learn_bpe matches a brute-force reference on random corpora") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<std::string, std::uint64_t>> words;
    const std::size_t n_words = 2 + rng.next_below(8);
    std::set<std::string> used;
    for (std::size_t w = 0; w < n_words; ++w) {
      std::string word;
      const std::size_t len = 1 + rng.next_below(6);
      for (std::size_t i = 0; i < len; ++i) {
        word += static_cast<char>('a' + rng.next_below(4));
      }
      if (!used.insert(word).second) continue;
      words.emplace_back(word, 1 + rng.next_below(9));
    }
    WordFreq table;
    for (const auto& [word, count] : words) table[word] = count;
    const BpeModel model = learn_bpe(table, 12);
    const auto expected = oracle::learn_bpe(words, 12, kMarker);
    if (merge_pairs(model) != expected) {
      CAPTURE(trial);
      CHECK(merge_pairs(model) == expected);
    } else {
      CHECK(model.merges.size() == expected.size());
    }
  }
}

TEST_CASE("learn_bpe never emits a duplicate merge and respects the cap") {
  WordFreq words;
  Rng rng(31337);
  for (int w = 0; w < 60; ++w) {
    std::string word;
    const std::size_t len = 1 + rng.next_below(9);
    for (std::size_t i = 0; i < len; ++i) {
      word += static_cast<char>('a' + rng.next_below(5));
    }
    words[word] += 1 + rng.next_below(4);
  }
  const BpeModel model = learn_bpe(words, 50);
  CHECK(model.merges.size() <= 50);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& m : model.merges) {
    CHECK(seen.insert({m.left, m.right}).second);
  }
  // requesting fewer merges yields a prefix of the same sequence
  const BpeModel shorter = learn_bpe(words, 10);
  REQUIRE(shorter.merges.size() <= 10);
  for (std::size_t i = 0; i < shorter.merges.size(); ++i) {
    CHECK(shorter.merges[i].left == model.merges[i].left);
    CHECK(shorter.merges[i].right == model.merges[i].right);
  }
}

TEST_CASE("apply replays merges and detokenize inverts it") {
  const WordFreq words =
      freq({{"low", 5}, {"lower", 2}, {"newest", 6}, {"widest", 3}});
  const BpeModel model = learn_bpe(words, 4);
  BpeApplier applier(model);
  CHECK(applier.apply("lowest") ==
        std::vector<std::string>{"lo", "w", "est" + kMarker});
  CHECK(applier.apply("low lower") ==
        std::vector<std::string>{"lo", "w", kMarker, "lo", "w", "e", "r", kMarker});
  CHECK(detokenize(applier.apply("newest widest lowest"), model.marker) ==
        "newest widest lowest");
}

TEST_CASE("apply with no merges splits into characters plus marker") {
  BpeModel model;  // empty merge list, default marker
  BpeApplier applier(model);
  CHECK(applier.apply("ab") == std::vector<std::string>{"a", "b", kMarker});
  CHECK(applier.apply("ᓄᓇ") == std::vector<std::string>{"ᓄ", "ᓇ", kMarker});
  CHECK(applier.apply("  spaced  out ") ==
        std::vector<std::string>{"s", "p", "a", "c", "e", "d", kMarker,
                                 "o", "u", "t", kMarker});
  CHECK(applier.apply("").empty());
}

TEST_CASE("apply equals replaying merges one by one") {
  WordFreq words;
  Rng rng(777);
  for (int w = 0; w < 40; ++w) {
    std::string word;
    const std::size_t len = 1 + rng.next_below(8);
    for (std::size_t i = 0; i < len; ++i) {
      word += static_cast<char>('a' + rng.next_below(4));
    }
    words[word] += 1 + rng.next_below(5);
  }
  const BpeModel model = learn_bpe(words, 30);
  BpeApplier applier(model);
  for (const auto& [word, count] : words) {
    // reference: greedy left-to-right pass per merge, in learned order
    std::vector<std::string> syms = oracle::word_symbols(word, kMarker);
    for (const auto& m : model.merges) {
      std::vector<std::string> next;
      std::size_t i = 0;
      while (i < syms.size()) {
        if (i + 1 < syms.size() && syms[i] == m.left && syms[i + 1] == m.right) {
          next.push_back(m.left + m.right);
          i += 2;
        } else {
          next.push_back(syms[i]);
          ++i;
        }
      }
      syms = std::move(next);
    }
    std::vector<std::string> out;
    applier.apply_word(word, out);
    if (out != syms) CAPTURE(word);
    CHECK(out == syms);
  }
}

TEST_CASE("detokenize joins words and keeps partial pieces") {
  CHECK(detokenize({"lo", "w", kMarker, "cat" + kMarker}, kMarker) == "low cat");
  CHECK(detokenize({}, kMarker) == "");
  CHECK(detokenize({"frag", "ment"}, kMarker) == "fragment");
  CHECK(detokenize({"a" + kMarker}, kMarker) == "a");
}

TEST_CASE("model save and load round-trips") {
  TempDir dir("bpe");
  const WordFreq words =
      freq({{"low", 5}, {"lower", 2}, {"newest", 6}, {"widest", 3}});
  BpeModel model = learn_bpe(words, 4);
  const std::string path = (dir / "bpe.model").string();
  model.save(path);
  const BpeModel loaded = BpeModel::load(path);
  CHECK(loaded.marker == model.marker);
  CHECK(merge_pairs(loaded) == merge_pairs(model));
  BpeApplier applier(loaded);
  CHECK(applier.apply("lowest") ==
        std::vector<std::string>{"lo", "w", "est" + kMarker});
}

TEST_CASE("model load rejects corrupt files") {
  TempDir dir("bpe");
  const auto write = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name);
    out << body;
    return (dir / name).string();
  };
  CHECK_THROWS_AS(BpeModel::load(write("a", "wrong-magic 1 x\n")), std::runtime_error);
  CHECK_THROWS_AS(BpeModel::load(write("b", "iumix-bpe 2 x\n")), std::runtime_error);
  CHECK_THROWS_AS(BpeModel::load(write("c", "iumix-bpe 1 x\nonlyleft\n")),
                  std::runtime_error);
  CHECK_THROWS_AS(BpeModel::load((dir / "missing").string()), std::runtime_error);
}

TEST_CASE("applier rejects duplicate merges") {
  BpeModel model;
  model.merges = {{"a", "b"}, {"a", "b"}};
  CHECK_THROWS_AS(BpeApplier{model}, std::runtime_error);
}

TEST_CASE("count_words accumulates across corpora") {
  const std::vector<Corpus> corpora = {
      {{"the cat", "le chat"}},
      {{"the dog", "le chien"}},
  };
  const WordFreq words = count_words(corpora);
  CHECK(words.at("the") == 2);
  CHECK(words.at("le") == 2);
  CHECK(words.at("cat") == 1);
  CHECK(words.at("chien") == 1);
}

TEST_CASE("vocab covers every token apply can produce") {
  const WordFreq words =
      freq({{"low", 5}, {"lower", 2}, {"newest", 6}, {"widest", 3}});
  const BpeModel model = learn_bpe(words, 4);
  const Vocab vocab = build_vocab(model, words);
  CHECK(vocab.size() <= 11 + 4);  // base symbols + merges
  BpeApplier applier(model);
  for (const auto& [word, count] : words) {
    std::vector<std::string> out;
    applier.apply_word(word, out);
    for (const auto& token : out) {
      if (vocab.ids.find(token) == vocab.ids.end()) CAPTURE(token);
      CHECK(vocab.ids.find(token) != vocab.ids.end());
    }
  }
  REQUIRE(!vocab.tokens.empty());
  CHECK(vocab.ids.at(vocab.tokens[0]) == 0);
}

TEST_CASE("vocab ordering is frequency descending then lexicographic") {
  // "ab" x3 and "cd" x3 with no merges: a,b,c,d appear 3 times each and the
  // marker 6 times
  const WordFreq words = freq({{"ab", 3}, {"cd", 3}});
  const BpeModel model = learn_bpe(words, 0);
  const Vocab vocab = build_vocab(model, words);
  REQUIRE(vocab.size() == 5);
  CHECK(vocab.tokens[0] == kMarker);
  CHECK(vocab.tokens[1] == "a");
  CHECK(vocab.tokens[2] == "b");
  CHECK(vocab.tokens[3] == "c");
  CHECK(vocab.tokens[4] == "d");
}

TEST_CASE("learning twice over the same data is byte-identical") {
  WordFreq words;
  Rng rng(5);
  for (int w = 0; w < 30; ++w) {
    std::string word;
    const std::size_t len = 1 + rng.next_below(7);
    for (std::size_t i = 0; i < len; ++i) {
      word += static_cast<char>('a' + rng.next_below(6));
    }
    words[word] += 1 + rng.next_below(3);
  }
  const BpeModel a = learn_bpe(words, 25);
  const BpeModel b = learn_bpe(words, 25);
  CHECK(merge_pairs(a) == merge_pairs(b));
}
