#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_set>
#include <utility>

#include "iumix/corpus.hpp"

namespace iumix {

// Evaluation order is fixed; a segment failing several rules is counted
// under the first.
enum class CleanRule : int {
  avg_token_len = 0,
  identical = 1,
  number_mismatch = 2,
  char_ratio = 3,
};

inline constexpr std::array<CleanRule, 4> kCleanRules = {
    CleanRule::avg_token_len,
    CleanRule::identical,
    CleanRule::number_mismatch,
    CleanRule::char_ratio,
};

std::string_view to_string(CleanRule rule);
std::optional<CleanRule> clean_rule_from_string(std::string_view name);

struct CleanConfig {
  double min_avg_token_len = 1.0;
  double max_avg_token_len = 40.0;
  double max_char_ratio = 9.0;
  std::array<bool, 4> rules_enabled = {true, true, true, true};

  bool enabled(CleanRule rule) const {
    return rules_enabled[static_cast<int>(rule)];
  }
  // Throws std::invalid_argument when thresholds are inconsistent.
  void validate() const;
};

struct Decision {
  bool keep = true;
  CleanRule rule = CleanRule::avg_token_len;  // meaningful iff !keep
};

struct CleanReport {
  std::uint64_t raw = 0;
  std::uint64_t selected = 0;
  std::uint64_t duplicates_removed = 0;
  std::array<std::uint64_t, 4> dropped_by_rule = {0, 0, 0, 0};

  std::uint64_t dropped(CleanRule rule) const {
    return dropped_by_rule[static_cast<int>(rule)];
  }
};

Decision evaluate_rules(const ParallelSegment& seg, const CleanConfig& cfg);

// Keeps the first occurrence of each byte-identical (source, target) pair.
// A caller-held seen set makes the pass global across several corpora.
std::pair<Corpus, std::uint64_t> dedup(Corpus corpus,
                                       std::unordered_set<std::string>* seen = nullptr);

// Dedup, then per-segment rules; survivors keep input order and
// raw == selected + duplicates_removed + sum(dropped_by_rule).
std::pair<Corpus, CleanReport> clean(Corpus corpus, const CleanConfig& cfg,
                                     std::unordered_set<std::string>* seen = nullptr);

}  // namespace iumix
