#include "iumix/mixer.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "iumix/rng.hpp"
#include "iumix/tokens.hpp"

namespace iumix {

namespace {

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  for_each_token(text, [&](std::string_view t) { tokens.emplace_back(t); });
  return tokens;
}

std::uint64_t substream_seed(std::uint64_t seed, const std::string& dataset_id,
                             std::uint32_t dir_index, std::uint64_t epoch) {
  std::uint64_t s = mix_seed(seed, fnv1a64(dataset_id));
  s = mix_seed(s, dir_index);
  return mix_seed(s, epoch);
}

}  // namespace

std::string make_tag(const std::string& tag_format, const std::string& tgt_lang) {
  static constexpr std::string_view kPlaceholder = "{lang}";
  std::string tag;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t hit = tag_format.find(kPlaceholder, pos);
    if (hit == std::string::npos) {
      tag += tag_format.substr(pos);
      return tag;
    }
    tag += tag_format.substr(pos, hit - pos);
    tag += tgt_lang;
    pos = hit + kPlaceholder.size();
  }
}

std::vector<DirectedSegment> expand_directions(const Corpus& corpus,
                                               const std::string& src_lang,
                                               const std::string& tgt_lang,
                                               const std::vector<Direction>& directions,
                                               const std::string& corpus_name) {
  std::vector<bool> reversed;
  reversed.reserve(directions.size());
  for (const auto& dir : directions) {
    if (dir.src == src_lang && dir.tgt == tgt_lang) {
      reversed.push_back(false);
    } else if (dir.src == tgt_lang && dir.tgt == src_lang) {
      reversed.push_back(true);
    } else {
      throw std::invalid_argument("direction " + dir.src + "-" + dir.tgt +
                                  " is not satisfiable by corpus " + corpus_name +
                                  " (" + src_lang + "-" + tgt_lang + ")");
    }
  }
  std::vector<DirectedSegment> out;
  out.reserve(corpus.size() * directions.size());
  for (const auto& seg : corpus) {
    for (std::size_t d = 0; d < directions.size(); ++d) {
      if (reversed[d]) {
        out.push_back({{seg.target, seg.source}, directions[d]});
      } else {
        out.push_back({{seg.source, seg.target}, directions[d]});
      }
    }
  }
  return out;
}

TaggedExample tag_example(const ParallelSegment& seg, const Direction& dir,
                          const std::string& dataset_id, const MixConfig& cfg) {
  TaggedExample ex;
  ex.source_tokens.push_back(make_tag(cfg.tag_format, dir.tgt));
  for (auto& t : split_tokens(seg.source)) ex.source_tokens.push_back(std::move(t));
  ex.target_tokens = split_tokens(seg.target);
  ex.dataset_id = dataset_id;
  ex.direction = dir;
  return ex;
}

MixStream::MixStream(std::vector<MixDatasetSpec> datasets, MixConfig cfg)
    : cfg_(std::move(cfg)) {
  if (datasets.empty()) throw std::invalid_argument("no datasets to mix");
  if (cfg_.directions.empty()) throw std::invalid_argument("no directions requested");
  if (cfg_.tag_format.find("{lang}") == std::string::npos) {
    throw std::invalid_argument("tag_format must contain {lang}");
  }

  std::unordered_set<std::string> tag_set;
  for (const auto& dir : cfg_.directions) {
    const std::string tag = make_tag(cfg_.tag_format, dir.tgt);
    if (tag_set.insert(tag).second) tags_.push_back(tag);
  }

  std::vector<bool> direction_used(cfg_.directions.size(), false);
  std::unordered_set<std::string> ids;
  for (auto& spec : datasets) {
    if (spec.weight == 0) {
      throw std::invalid_argument("dataset " + spec.id + ": weight must be positive");
    }
    if (spec.corpus.empty()) {
      throw std::invalid_argument("dataset " + spec.id + " is empty");
    }
    if (!ids.insert(spec.id).second) {
      throw std::invalid_argument("duplicate dataset id " + spec.id);
    }

    DatasetState ds;
    ds.spec = std::move(spec);
    std::uint32_t dir_index = 0;
    for (std::size_t d = 0; d < cfg_.directions.size(); ++d) {
      const auto& dir = cfg_.directions[d];
      bool rev;
      if (dir.src == ds.spec.src_lang && dir.tgt == ds.spec.tgt_lang) {
        rev = false;
      } else if (dir.src == ds.spec.tgt_lang && dir.tgt == ds.spec.src_lang) {
        rev = true;
      } else {
        continue;
      }
      direction_used[d] = true;
      Substream sub;
      sub.dataset = datasets_.size();
      sub.direction = dir;
      sub.reversed = rev;
      sub.dir_index = dir_index++;
      ds.subs.push_back(subs_.size());
      subs_.push_back(std::move(sub));
    }
    if (ds.subs.empty()) {
      throw std::invalid_argument("dataset " + ds.spec.id +
                                  " (" + ds.spec.src_lang + "-" + ds.spec.tgt_lang +
                                  ") serves no requested direction");
    }
    cycle_length_ += ds.spec.weight;
    totals_.per_dataset.emplace(ds.spec.id, 0);
    datasets_.push_back(std::move(ds));
  }
  for (std::size_t d = 0; d < cfg_.directions.size(); ++d) {
    if (!direction_used[d]) {
      throw std::invalid_argument("direction " + cfg_.directions[d].src + "-" +
                                  cfg_.directions[d].tgt + " matches no dataset");
    }
  }

  // Tag tokens must not occur as data tokens anywhere.
  for (const auto& ds : datasets_) {
    for (const auto& seg : ds.spec.corpus) {
      for (const auto* side : {&seg.source, &seg.target}) {
        for_each_token(*side, [&](std::string_view t) {
          if (tag_set.count(std::string(t))) {
            throw std::invalid_argument("tag token " + std::string(t) +
                                        " occurs in dataset " + ds.spec.id);
          }
        });
      }
    }
  }

  for (auto& sub : subs_) reshuffle(sub);
}

void MixStream::reshuffle(Substream& sub) {
  const auto& ds = datasets_[sub.dataset];
  const auto n = static_cast<std::uint32_t>(ds.spec.corpus.size());
  sub.order.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) sub.order[i] = i;
  if (cfg_.shuffle) {
    Rng rng(substream_seed(cfg_.seed, ds.spec.id, sub.dir_index, sub.epoch));
    rng.shuffle(sub.order);
  }
  sub.pos = 0;
  ++sub.epoch;
}

bool MixStream::cycle_feasible() const {
  for (const auto& ds : datasets_) {
    std::vector<std::uint64_t> need(ds.subs.size(), 0);
    for (std::uint64_t k = 0; k < ds.spec.weight; ++k) {
      ++need[(ds.dir_counter + k) % ds.subs.size()];
    }
    for (std::size_t i = 0; i < ds.subs.size(); ++i) {
      const auto& sub = subs_[ds.subs[i]];
      if (sub.order.size() - sub.pos < need[i]) return false;
    }
  }
  return true;
}

bool MixStream::next(TaggedExample& out) {
  if (ended_) return false;
  if (cur_dataset_ == 0 && cur_emitted_ == 0 &&
      cfg_.policy == ExhaustionPolicy::stop && !cycle_feasible()) {
    ended_ = true;
    return false;
  }

  auto& ds = datasets_[cur_dataset_];
  auto& sub = subs_[ds.subs[ds.dir_counter % ds.subs.size()]];
  ++ds.dir_counter;

  if (sub.pos == sub.order.size()) reshuffle(sub);  // restart policy only
  const auto& seg = ds.spec.corpus[sub.order[sub.pos++]];
  if (sub.reversed) {
    out = tag_example({seg.target, seg.source}, sub.direction, ds.spec.id, cfg_);
  } else {
    out = tag_example(seg, sub.direction, ds.spec.id, cfg_);
  }

  ++totals_.examples;
  ++totals_.per_dataset[ds.spec.id];
  if (++cur_emitted_ == ds.spec.weight) {
    cur_emitted_ = 0;
    if (++cur_dataset_ == datasets_.size()) {
      cur_dataset_ = 0;
      ++totals_.cycles;
    }
  }
  return true;
}

}  // namespace iumix
