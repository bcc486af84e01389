#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "iumix/corpus.hpp"

namespace iumix {

inline constexpr const char* kDefaultBpeMarker = "⟨/w⟩";

struct BpeMerge {
  std::string left;
  std::string right;
};

struct BpeModel {
  std::string marker = kDefaultBpeMarker;
  std::vector<BpeMerge> merges;  // learned order, no duplicates

  // Text format: "iumix-bpe 1 <marker>" header, then "left right" per line.
  void save(const std::string& path) const;
  static BpeModel load(const std::string& path);
};

using WordFreq = std::unordered_map<std::string, std::uint64_t>;

void count_words(std::string_view text, WordFreq& into);
WordFreq count_words(const std::vector<Corpus>& corpora);

// Merges the most frequent adjacent symbol pair until n_merges are learned
// or no pair occurs twice; ties go to the lexicographically smallest
// (left, right). Each word ends in the marker as its own symbol.
BpeModel learn_bpe(const WordFreq& words, std::size_t n_merges,
                   const std::string& marker = kDefaultBpeMarker);
BpeModel learn_bpe(const std::vector<Corpus>& corpora, std::size_t n_merges,
                   const std::string& marker = kDefaultBpeMarker);

// Replays merges in learned order over each whitespace word. Caches per
// distinct word, so one instance per thread.
class BpeApplier {
 public:
  explicit BpeApplier(const BpeModel& model);

  std::vector<std::string> apply(std::string_view text);
  void apply_word(std::string_view word, std::vector<std::string>& out);

 private:
  std::uint32_t intern(std::string_view symbol);
  const std::vector<std::uint32_t>& encode(std::string_view word);

  std::string marker_;
  std::uint32_t marker_id_ = 0;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::uint32_t> symbol_ids_;
  std::unordered_map<std::uint64_t, std::uint32_t> pair_rank_;
  std::vector<std::uint64_t> rank_pair_;
  std::vector<std::uint32_t> rank_product_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> word_cache_;
};

std::vector<std::string> apply_bpe(const BpeModel& model, std::string_view text);

// Inverse of apply on texts whose words are single-space separated and
// contain no marker occurrence.
std::string detokenize(const std::vector<std::string>& tokens, std::string_view marker);

struct Vocab {
  std::vector<std::string> tokens;                     // id -> token
  std::unordered_map<std::string, std::uint32_t> ids;  // token -> id

  std::size_t size() const { return tokens.size(); }
};

// Distinct subword tokens over the corpora, frequency descending then
// lexicographic; |vocab| <= |base symbols| + n_merges.
Vocab build_vocab(const BpeModel& model, const WordFreq& words);
Vocab build_vocab(const BpeModel& model, const std::vector<Corpus>& corpora);

}  // namespace iumix
