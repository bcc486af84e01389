#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "iumix/corpus.hpp"

namespace iumix {

struct Direction {
  std::string src;
  std::string tgt;

  bool operator==(const Direction& o) const { return src == o.src && tgt == o.tgt; }
};

enum class ExhaustionPolicy { restart, stop };

struct MixConfig {
  std::vector<Direction> directions;
  std::string tag_format = "⟨2{lang}⟩";  // {lang} replaced by target language
  std::uint64_t seed = 0;
  ExhaustionPolicy policy = ExhaustionPolicy::restart;
  bool shuffle = true;
};

struct MixDatasetSpec {
  std::string id;
  std::string src_lang;
  std::string tgt_lang;
  std::uint64_t weight = 1;
  Corpus corpus;  // already subword-tokenized, tokens space-joined
};

struct TaggedExample {
  std::vector<std::string> source_tokens;  // [0] is the tag token
  std::vector<std::string> target_tokens;
  std::string dataset_id;
  Direction direction;
};

struct DirectedSegment {
  ParallelSegment segment;
  Direction direction;
};

std::string make_tag(const std::string& tag_format, const std::string& tgt_lang);

// Forward direction keeps the segment, reverse swaps it; a direction that is
// neither the corpus pair nor its reverse throws std::invalid_argument
// naming corpus_name.
std::vector<DirectedSegment> expand_directions(const Corpus& corpus,
                                               const std::string& src_lang,
                                               const std::string& tgt_lang,
                                               const std::vector<Direction>& directions,
                                               const std::string& corpus_name);

TaggedExample tag_example(const ParallelSegment& seg, const Direction& dir,
                          const std::string& dataset_id, const MixConfig& cfg);

struct MixTotals {
  std::uint64_t examples = 0;
  std::uint64_t cycles = 0;
  std::map<std::string, std::uint64_t> per_dataset;
};

// One cycle emits weight_d consecutive examples per dataset, datasets in
// declared order; a dataset's directions alternate within its quota, the
// alternation persisting across cycles. Each (dataset, direction) substream
// is an independently seeded shuffle drawn without replacement; restart
// reshuffles an exhausted substream, stop ends the stream before the first
// cycle it cannot complete.
class MixStream {
 public:
  MixStream(std::vector<MixDatasetSpec> datasets, MixConfig cfg);

  bool next(TaggedExample& out);

  const std::vector<std::string>& tag_tokens() const { return tags_; }
  const MixTotals& totals() const { return totals_; }
  std::uint64_t cycle_length() const { return cycle_length_; }

 private:
  struct Substream {
    std::size_t dataset;
    Direction direction;
    bool reversed;
    std::uint32_t dir_index;
    std::vector<std::uint32_t> order;
    std::size_t pos = 0;
    std::uint64_t epoch = 0;
  };
  struct DatasetState {
    MixDatasetSpec spec;
    std::vector<std::size_t> subs;
    std::uint64_t dir_counter = 0;
  };

  void reshuffle(Substream& sub);
  bool cycle_feasible() const;

  MixConfig cfg_;
  std::vector<DatasetState> datasets_;
  std::vector<Substream> subs_;
  std::vector<std::string> tags_;
  std::uint64_t cycle_length_ = 0;
  MixTotals totals_;

  std::size_t cur_dataset_ = 0;
  std::uint64_t cur_emitted_ = 0;  // within current dataset's quota
  bool ended_ = false;
};

}  // namespace iumix
