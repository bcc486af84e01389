#include "iumix/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "iumix/tokens.hpp"
#include "iumix/utf8.hpp"

namespace iumix {

namespace {

constexpr std::uint64_t pair_key(std::uint32_t l, std::uint32_t r) {
  return (static_cast<std::uint64_t>(l) << 32) | r;
}

void check_marker(const std::string& marker) {
  if (marker.empty()) throw std::invalid_argument("marker must be non-empty");
  for (const char c : marker) {
    if (static_cast<unsigned char>(c) <= 0x20) {
      throw std::invalid_argument("marker must not contain whitespace");
    }
  }
}

// One symbol per codepoint; a malformed byte stands alone.
template <typename F>
void for_each_base_symbol(std::string_view word, F&& fn) {
  std::size_t i = 0;
  while (i < word.size()) {
    char32_t cp = 0;
    const std::size_t len = utf8::decode(word, i, cp);
    const std::size_t step = len == 0 ? 1 : len;
    fn(word.substr(i, step));
    i += step;
  }
}

struct LearnState {
  std::vector<std::string> symbols;
  std::unordered_map<std::string, std::uint32_t> symbol_ids;

  struct Word {
    std::vector<std::uint32_t> syms;
    std::uint64_t freq;
  };
  std::vector<Word> words;

  std::unordered_map<std::uint64_t, std::uint64_t> pair_count;
  std::unordered_map<std::uint64_t, std::unordered_set<std::uint32_t>> pair_words;

  std::uint32_t intern(std::string_view s) {
    const auto it = symbol_ids.find(std::string(s));
    if (it != symbol_ids.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(symbols.size());
    symbols.emplace_back(s);
    symbol_ids.emplace(symbols.back(), id);
    return id;
  }

  void add_word_pairs(std::uint32_t w, std::int64_t sign) {
    const auto& syms = words[w].syms;
    const std::uint64_t freq = words[w].freq;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      const std::uint64_t key = pair_key(syms[i], syms[i + 1]);
      if (sign > 0) {
        pair_count[key] += freq;
        pair_words[key].insert(w);
      } else {
        auto it = pair_count.find(key);
        it->second -= freq;
        if (it->second == 0) {
          pair_count.erase(it);
          pair_words.erase(key);
        }
      }
    }
    if (sign < 0) {
      // A pair may survive in other words; drop only this word's membership.
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        const std::uint64_t key = pair_key(syms[i], syms[i + 1]);
        const auto it = pair_words.find(key);
        if (it != pair_words.end()) it->second.erase(w);
      }
    }
  }
};

}  // namespace

void count_words(std::string_view text, WordFreq& into) {
  for_each_token(text, [&](std::string_view token) { ++into[std::string(token)]; });
}

WordFreq count_words(const std::vector<Corpus>& corpora) {
  WordFreq words;
  for (const auto& corpus : corpora) {
    for (const auto& seg : corpus) {
      count_words(seg.source, words);
      count_words(seg.target, words);
    }
  }
  return words;
}

BpeModel learn_bpe(const WordFreq& words, std::size_t n_merges, const std::string& marker) {
  check_marker(marker);
  BpeModel model;
  model.marker = marker;

  LearnState st;
  const std::uint32_t marker_id = st.intern(marker);
  st.words.reserve(words.size());
  // Sort the table so interned ids (and thus nothing observable) never depend
  // on hash iteration order; selection below is order-free regardless.
  std::vector<const WordFreq::value_type*> sorted;
  sorted.reserve(words.size());
  for (const auto& kv : words) sorted.push_back(&kv);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  for (const auto* kv : sorted) {
    LearnState::Word word;
    word.freq = kv->second;
    for_each_base_symbol(kv->first,
                         [&](std::string_view s) { word.syms.push_back(st.intern(s)); });
    word.syms.push_back(marker_id);
    st.words.push_back(std::move(word));
  }
  for (std::uint32_t w = 0; w < st.words.size(); ++w) st.add_word_pairs(w, +1);

  while (model.merges.size() < n_merges && !st.pair_count.empty()) {
    std::uint64_t best_key = 0;
    std::uint64_t best_count = 0;
    const std::string* best_left = nullptr;
    const std::string* best_right = nullptr;
    for (const auto& [key, count] : st.pair_count) {
      if (count < 2) continue;
      const std::string& left = st.symbols[static_cast<std::uint32_t>(key >> 32)];
      const std::string& right = st.symbols[static_cast<std::uint32_t>(key)];
      if (best_left == nullptr || count > best_count ||
          (count == best_count &&
           (left < *best_left || (left == *best_left && right < *best_right)))) {
        best_key = key;
        best_count = count;
        best_left = &left;
        best_right = &right;
      }
    }
    if (best_left == nullptr) break;  // max pair frequency < 2

    const auto left_id = static_cast<std::uint32_t>(best_key >> 32);
    const auto right_id = static_cast<std::uint32_t>(best_key);
    model.merges.push_back({*best_left, *best_right});
    const std::uint32_t merged_id = st.intern(*best_left + *best_right);

    const auto affected_it = st.pair_words.find(best_key);
    std::vector<std::uint32_t> affected(affected_it->second.begin(),
                                        affected_it->second.end());
    std::sort(affected.begin(), affected.end());
    for (const std::uint32_t w : affected) {
      st.add_word_pairs(w, -1);
      auto& syms = st.words[w].syms;
      std::vector<std::uint32_t> next;
      next.reserve(syms.size());
      std::size_t i = 0;
      while (i < syms.size()) {
        if (i + 1 < syms.size() && syms[i] == left_id && syms[i + 1] == right_id) {
          next.push_back(merged_id);
          i += 2;
        } else {
          next.push_back(syms[i]);
          ++i;
        }
      }
      syms = std::move(next);
      st.add_word_pairs(w, +1);
    }
  }
  return model;
}

BpeModel learn_bpe(const std::vector<Corpus>& corpora, std::size_t n_merges,
                   const std::string& marker) {
  return learn_bpe(count_words(corpora), n_merges, marker);
}

void BpeModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "iumix-bpe 1 " << marker << '\n';
  for (const auto& m : merges) out << m.left << ' ' << m.right << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

BpeModel BpeModel::load(const std::string& path) {
  const auto lines = load_lines(path);
  if (lines.empty()) throw std::runtime_error(path + ": missing header");
  const std::string& header = lines[0];
  const std::size_t sp1 = header.find(' ');
  const std::size_t sp2 = sp1 == std::string::npos ? std::string::npos
                                                   : header.find(' ', sp1 + 1);
  if (sp2 == std::string::npos || header.substr(0, sp1) != "iumix-bpe" ||
      header.substr(sp1 + 1, sp2 - sp1 - 1) != "1") {
    throw std::runtime_error(path + ": bad header '" + header + "'");
  }
  BpeModel model;
  model.marker = header.substr(sp2 + 1);
  check_marker(model.marker);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0 || sp + 1 == line.size()) {
      throw std::runtime_error(path + ":" + std::to_string(i + 1) + ": bad merge line");
    }
    model.merges.push_back({line.substr(0, sp), line.substr(sp + 1)});
  }
  return model;
}

BpeApplier::BpeApplier(const BpeModel& model) : marker_(model.marker) {
  check_marker(marker_);
  marker_id_ = intern(marker_);
  rank_product_.reserve(model.merges.size());
  for (const auto& m : model.merges) {
    const std::uint32_t l = intern(m.left);
    const std::uint32_t r = intern(m.right);
    const auto rank = static_cast<std::uint32_t>(rank_product_.size());
    if (!pair_rank_.emplace(pair_key(l, r), rank).second) {
      throw std::runtime_error("duplicate merge pair: " + m.left + " " + m.right);
    }
    rank_pair_.push_back(pair_key(l, r));
    rank_product_.push_back(intern(m.left + m.right));
  }
}

std::uint32_t BpeApplier::intern(std::string_view symbol) {
  const auto it = symbol_ids_.find(std::string(symbol));
  if (it != symbol_ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(symbols_.size());
  symbols_.emplace_back(symbol);
  symbol_ids_.emplace(symbols_.back(), id);
  return id;
}

const std::vector<std::uint32_t>& BpeApplier::encode(std::string_view word) {
  const auto cached = word_cache_.find(std::string(word));
  if (cached != word_cache_.end()) return cached->second;

  std::vector<std::uint32_t> syms;
  for_each_base_symbol(word, [&](std::string_view s) { syms.push_back(intern(s)); });
  syms.push_back(marker_id_);

  // Replaying ranks in ascending order, one left-to-right pass each, equals
  // replaying every merge in learned order: a pass can only create pairs
  // whose rank a full replay would reach later, so lower ranks are skipped.
  std::set<std::uint32_t> pending;
  for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
    const auto it = pair_rank_.find(pair_key(syms[i], syms[i + 1]));
    if (it != pair_rank_.end()) pending.insert(it->second);
  }
  while (!pending.empty()) {
    const std::uint32_t rank = *pending.begin();
    pending.erase(pending.begin());
    const std::uint64_t key = rank_pair_[rank];
    const auto left_id = static_cast<std::uint32_t>(key >> 32);
    const auto right_id = static_cast<std::uint32_t>(key);
    const std::uint32_t merged_id = rank_product_[rank];
    std::vector<std::uint32_t> next;
    next.reserve(syms.size());
    std::size_t i = 0;
    while (i < syms.size()) {
      if (i + 1 < syms.size() && syms[i] == left_id && syms[i + 1] == right_id) {
        next.push_back(merged_id);
        i += 2;
      } else {
        next.push_back(syms[i]);
        ++i;
      }
    }
    syms = std::move(next);
    for (std::size_t j = 0; j + 1 < syms.size(); ++j) {
      const auto it = pair_rank_.find(pair_key(syms[j], syms[j + 1]));
      if (it != pair_rank_.end() && it->second > rank) pending.insert(it->second);
    }
  }
  return word_cache_.emplace(std::string(word), std::move(syms)).first->second;
}

void BpeApplier::apply_word(std::string_view word, std::vector<std::string>& out) {
  for (const std::uint32_t id : encode(word)) out.push_back(symbols_[id]);
}

std::vector<std::string> BpeApplier::apply(std::string_view text) {
  std::vector<std::string> out;
  for_each_token(text, [&](std::string_view word) { apply_word(word, out); });
  return out;
}

std::vector<std::string> apply_bpe(const BpeModel& model, std::string_view text) {
  BpeApplier applier(model);
  return applier.apply(text);
}

std::string detokenize(const std::vector<std::string>& tokens, std::string_view marker) {
  std::string joined;
  for (const auto& t : tokens) joined += t;
  std::string out;
  out.reserve(joined.size());
  std::size_t i = 0;
  while (i < joined.size()) {
    if (!marker.empty() && joined.compare(i, marker.size(), marker) == 0) {
      out += ' ';
      i += marker.size();
    } else {
      out += joined[i];
      ++i;
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

Vocab build_vocab(const BpeModel& model, const WordFreq& words) {
  BpeApplier applier(model);
  std::unordered_map<std::string, std::uint64_t> freq;
  std::vector<std::string> toks;
  for (const auto& [word, count] : words) {
    toks.clear();
    applier.apply_word(word, toks);
    for (const auto& t : toks) freq[t] += count;
  }
  std::vector<const std::pair<const std::string, std::uint64_t>*> order;
  order.reserve(freq.size());
  for (const auto& kv : freq) order.push_back(&kv);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->second != b->second) return a->second > b->second;
    return a->first < b->first;
  });
  Vocab vocab;
  vocab.tokens.reserve(order.size());
  for (const auto* kv : order) {
    vocab.ids.emplace(kv->first, static_cast<std::uint32_t>(vocab.tokens.size()));
    vocab.tokens.push_back(kv->first);
  }
  return vocab;
}

Vocab build_vocab(const BpeModel& model, const std::vector<Corpus>& corpora) {
  return build_vocab(model, count_words(corpora));
}

}  // namespace iumix
