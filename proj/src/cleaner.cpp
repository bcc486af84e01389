#include "iumix/cleaner.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "iumix/tokens.hpp"
#include "iumix/utf8.hpp"

namespace iumix {

namespace {

bool avg_token_len_ok(std::string_view text, const CleanConfig& cfg) {
  const TokenStats stats = token_stats(text);
  const double avg =
      stats.tokens == 0
          ? 0.0
          : static_cast<double>(stats.chars) / static_cast<double>(stats.tokens);
  return avg >= cfg.min_avg_token_len && avg <= cfg.max_avg_token_len;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Maximal ASCII digit runs; a ',' or '.' flanked by digits is a grouping
// separator and does not end the run.
std::vector<std::string> digit_runs(std::string_view text) {
  std::vector<std::string> runs;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    std::string run;
    while (i < text.size()) {
      if (is_digit(text[i])) {
        run += text[i];
        ++i;
      } else if ((text[i] == ',' || text[i] == '.') && i + 1 < text.size() &&
                 is_digit(text[i + 1])) {
        ++i;
      } else {
        break;
      }
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

bool numbers_match(const ParallelSegment& seg) {
  auto src = digit_runs(seg.source);
  auto tgt = digit_runs(seg.target);
  std::sort(src.begin(), src.end());
  std::sort(tgt.begin(), tgt.end());
  return src == tgt;
}

bool char_ratio_ok(const ParallelSegment& seg, const CleanConfig& cfg) {
  const std::uint64_t s = utf8::codepoint_count(seg.source);
  const std::uint64_t t = utf8::codepoint_count(seg.target);
  const std::uint64_t hi = std::max(s, t);
  const std::uint64_t lo = std::max<std::uint64_t>(1, std::min(s, t));
  return static_cast<double>(hi) / static_cast<double>(lo) <= cfg.max_char_ratio;
}

}  // namespace

std::string_view to_string(CleanRule rule) {
  switch (rule) {
    case CleanRule::avg_token_len: return "avg_token_len";
    case CleanRule::identical: return "identical";
    case CleanRule::number_mismatch: return "number_mismatch";
    case CleanRule::char_ratio: return "char_ratio";
  }
  return "unknown";
}

std::optional<CleanRule> clean_rule_from_string(std::string_view name) {
  for (const CleanRule rule : kCleanRules) {
    if (to_string(rule) == name) return rule;
  }
  return std::nullopt;
}

void CleanConfig::validate() const {
  if (!(min_avg_token_len < max_avg_token_len)) {
    throw std::invalid_argument("min_avg_token_len must be < max_avg_token_len");
  }
  if (!(max_char_ratio > 1.0)) {
    throw std::invalid_argument("max_char_ratio must be > 1");
  }
}

Decision evaluate_rules(const ParallelSegment& seg, const CleanConfig& cfg) {
  if (cfg.enabled(CleanRule::avg_token_len) &&
      (!avg_token_len_ok(seg.source, cfg) || !avg_token_len_ok(seg.target, cfg))) {
    return {false, CleanRule::avg_token_len};
  }
  if (cfg.enabled(CleanRule::identical) && seg.source == seg.target) {
    return {false, CleanRule::identical};
  }
  if (cfg.enabled(CleanRule::number_mismatch) && !numbers_match(seg)) {
    return {false, CleanRule::number_mismatch};
  }
  if (cfg.enabled(CleanRule::char_ratio) && !char_ratio_ok(seg, cfg)) {
    return {false, CleanRule::char_ratio};
  }
  return {true, CleanRule::avg_token_len};
}

std::pair<Corpus, std::uint64_t> dedup(Corpus corpus,
                                       std::unordered_set<std::string>* seen) {
  std::unordered_set<std::string> local;
  std::unordered_set<std::string>& keys = seen ? *seen : local;
  keys.reserve(keys.size() + corpus.size());
  Corpus kept;
  kept.reserve(corpus.size());
  std::uint64_t removed = 0;
  for (auto& seg : corpus) {
    std::string key = seg.source;
    key += '\n';
    key += seg.target;
    if (keys.insert(std::move(key)).second) {
      kept.push_back(std::move(seg));
    } else {
      ++removed;
    }
  }
  return {std::move(kept), removed};
}

std::pair<Corpus, CleanReport> clean(Corpus corpus, const CleanConfig& cfg,
                                     std::unordered_set<std::string>* seen) {
  cfg.validate();
  CleanReport report;
  report.raw = corpus.size();
  auto [unique, removed] = dedup(std::move(corpus), seen);
  report.duplicates_removed = removed;
  Corpus selected;
  selected.reserve(unique.size());
  for (auto& seg : unique) {
    const Decision decision = evaluate_rules(seg, cfg);
    if (decision.keep) {
      selected.push_back(std::move(seg));
    } else {
      ++report.dropped_by_rule[static_cast<int>(decision.rule)];
    }
  }
  report.selected = selected.size();
  return {std::move(selected), report};
}

}  // namespace iumix
