#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "iumix/mixer.hpp"

using namespace iumix;

namespace {

Corpus numbered_corpus(const std::string& prefix, std::size_t n) {
  Corpus corpus;
  for (std::size_t i = 0; i < n; ++i) {
    corpus.push_back({prefix + "s" + std::to_string(i), prefix + "t" + std::to_string(i)});
  }
  return corpus;
}

MixConfig config(std::vector<Direction> dirs) {
  MixConfig cfg;
  cfg.directions = std::move(dirs);
  cfg.seed = 42;
  return cfg;
}

}  // namespace

TEST_CASE("make_tag substitutes every placeholder") {
  CHECK(make_tag("⟨2{lang}⟩", "en") == "⟨2en⟩");
  CHECK(make_tag("⟨2{lang}⟩", "iu") == "⟨2iu⟩");
  CHECK(make_tag("<{lang}-{lang}>", "fi") == "<fi-fi>");
  CHECK(make_tag("plain", "en") == "plain");
}

TEST_CASE("expand_directions emits per segment, forward then reverse") {
  const Corpus corpus = {{"hello", "bonjour"}, {"bye", "salut"}};
  const std::vector<Direction> dirs = {{"en", "fr"}, {"fr", "en"}};
  const auto expanded = expand_directions(corpus, "en", "fr", dirs, "demo");
  REQUIRE(expanded.size() == 4);
  CHECK(expanded[0].segment.source == "hello");
  CHECK(expanded[0].direction == Direction{"en", "fr"});
  CHECK(expanded[1].segment.source == "bonjour");
  CHECK(expanded[1].segment.target == "hello");
  CHECK(expanded[1].direction == Direction{"fr", "en"});
  CHECK(expanded[2].segment.source == "bye");
  CHECK(expanded[3].segment.source == "salut");
}

TEST_CASE("expand_directions rejects foreign directions") {
  const Corpus corpus = {{"a", "b"}};
  CHECK_THROWS_WITH_AS(
      expand_directions(corpus, "en", "fr", {{"en", "de"}}, "demo"),
      "direction en-de is not satisfiable by corpus demo (en-fr)",
      std::invalid_argument);
}

TEST_CASE("tag_example prepends exactly one tag token") {
  MixConfig cfg = config({{"en", "iu"}});
  const TaggedExample ex =
      tag_example({"the good land", "ᓄᓇᑦᓯᐊᕗᑦ"}, {"en", "iu"}, "hansard", cfg);
  CHECK(ex.source_tokens ==
        std::vector<std::string>{"⟨2iu⟩", "the", "good", "land"});
  CHECK(ex.target_tokens == std::vector<std::string>{"ᓄᓇᑦᓯᐊᕗᑦ"});
  CHECK(ex.dataset_id == "hansard");
  CHECK(ex.direction == Direction{"en", "iu"});
}

TEST_CASE("weights set the per-cycle quota in declared order") {
  std::vector<MixDatasetSpec> datasets = {
      {"A", "en", "fr", 2, numbered_corpus("a", 8)},
      {"B", "en", "fr", 1, numbered_corpus("b", 8)},
  };
  MixStream stream(datasets, config({{"en", "fr"}}));
  CHECK(stream.cycle_length() == 3);
  std::vector<std::string> ids;
  TaggedExample ex;
  for (int i = 0; i < 6; ++i) {
    REQUIRE(stream.next(ex));
    ids.push_back(ex.dataset_id);
  }
  CHECK(ids == std::vector<std::string>{"A", "A", "B", "A", "A", "B"});
  CHECK(stream.totals().cycles == 2);
  CHECK(stream.totals().examples == 6);
  CHECK(stream.totals().per_dataset.at("A") == 4);
  CHECK(stream.totals().per_dataset.at("B") == 2);
}

TEST_CASE("directions alternate within a dataset and across cycles") {
  std::vector<MixDatasetSpec> datasets = {
      {"H", "en", "iu", 3, numbered_corpus("h", 12)},
  };
  MixStream stream(datasets, config({{"en", "iu"}, {"iu", "en"}}));
  std::vector<std::string> tgts;
  TaggedExample ex;
  for (int i = 0; i < 6; ++i) {
    REQUIRE(stream.next(ex));
    tgts.push_back(ex.direction.tgt);
  }
  // weight 3 over two directions: cycle one gets iu,en,iu; the counter
  // carries over so cycle two continues en,iu,en
  CHECK(tgts == std::vector<std::string>{"iu", "en", "iu", "en", "iu", "en"});
}

TEST_CASE("reversed directions swap source and target") {
  std::vector<MixDatasetSpec> datasets = {
      {"H", "en", "iu", 1, Corpus{{"english words", "ᐃᓄᒃᑎᑐᑦ"}}},
  };
  MixConfig cfg = config({{"iu", "en"}});
  cfg.shuffle = false;
  MixStream stream(datasets, cfg);
  TaggedExample ex;
  REQUIRE(stream.next(ex));
  CHECK(ex.source_tokens == std::vector<std::string>{"⟨2en⟩", "ᐃᓄᒃᑎᑐᑦ"});
  CHECK(ex.target_tokens == std::vector<std::string>{"english", "words"});
}

TEST_CASE("each epoch is drawn without replacement") {
  std::vector<MixDatasetSpec> datasets = {
      {"A", "en", "fr", 4, numbered_corpus("a", 4)},
  };
  MixStream stream(datasets, config({{"en", "fr"}}));
  TaggedExample ex;
  for (int epoch = 0; epoch < 3; ++epoch) {
    std::set<std::string> seen;
    for (int i = 0; i < 4; ++i) {
      REQUIRE(stream.next(ex));
      seen.insert(ex.source_tokens[1]);
    }
    CHECK(seen.size() == 4);  // every segment exactly once per epoch
  }
}

TEST_CASE("restart reshuffles with a fresh permutation") {
  std::vector<MixDatasetSpec> datasets = {
      {"A", "en", "fr", 10, numbered_corpus("a", 10)},
  };
  MixStream stream(datasets, config({{"en", "fr"}}));
  TaggedExample ex;
  std::vector<std::string> first, second;
  for (int i = 0; i < 10; ++i) {
    REQUIRE(stream.next(ex));
    first.push_back(ex.source_tokens[1]);
  }
  for (int i = 0; i < 10; ++i) {
    REQUIRE(stream.next(ex));
    second.push_back(ex.source_tokens[1]);
  }
  CHECK(first != second);  // same set, different deterministic order
  CHECK(std::set<std::string>(first.begin(), first.end()) ==
        std::set<std::string>(second.begin(), second.end()));
}

TEST_CASE("stop policy ends at a cycle boundary") {
  std::vector<MixDatasetSpec> datasets = {
      {"A", "en", "fr", 2, numbered_corpus("a", 5)},
  };
  MixConfig cfg = config({{"en", "fr"}});
  cfg.policy = ExhaustionPolicy::stop;
  MixStream stream(datasets, cfg);
  TaggedExample ex;
  std::uint64_t emitted = 0;
  while (stream.next(ex)) ++emitted;
  CHECK(emitted == 4);  // two full cycles; the fifth segment cannot fill a cycle
  CHECK(stream.totals().cycles == 2);
  CHECK_FALSE(stream.next(ex));  // stays ended
}

TEST_CASE("stop policy accounts for direction alternation") {
  std::vector<MixDatasetSpec> datasets = {
      {"A", "en", "fr", 3, numbered_corpus("a", 3)},
  };
  MixConfig cfg = config({{"en", "fr"}, {"fr", "en"}});
  cfg.policy = ExhaustionPolicy::stop;
  MixStream stream(datasets, cfg);
  TaggedExample ex;
  std::uint64_t emitted = 0;
  while (stream.next(ex)) ++emitted;
  // cycle one needs 2+1 of the two substreams, cycle two 1+2; cycle three
  // would need two more of the first substream but only one remains unseen
  CHECK(emitted == 6);
  CHECK(stream.totals().cycles == 2);
}

TEST_CASE("streams are reproducible and seed-sensitive") {
  const auto run = [](std::uint64_t seed, int n) {
    std::vector<MixDatasetSpec> datasets = {
        {"A", "en", "fr", 2, numbered_corpus("a", 20)},
        {"B", "fr", "en", 1, numbered_corpus("b", 20)},
    };
    MixConfig cfg = config({{"en", "fr"}, {"fr", "en"}});
    cfg.seed = seed;
    MixStream stream(datasets, cfg);
    std::vector<std::string> trace;
    TaggedExample ex;
    for (int i = 0; i < n; ++i) {
      REQUIRE(stream.next(ex));
      std::string line = ex.dataset_id + "|" + ex.direction.src + ex.direction.tgt;
      for (const auto& t : ex.source_tokens) line += " " + t;
      line += " ||";
      for (const auto& t : ex.target_tokens) line += " " + t;
      trace.push_back(std::move(line));
    }
    return trace;
  };
  CHECK(run(7, 60) == run(7, 60));
  CHECK(run(7, 60) != run(8, 60));
}

TEST_CASE("every emitted example carries a known tag") {
  std::vector<MixDatasetSpec> datasets = {
      {"A", "en", "iu", 1, numbered_corpus("a", 5)},
      {"B", "en", "fi", 1, numbered_corpus("b", 5)},
  };
  MixStream stream(datasets, config({{"en", "iu"}, {"en", "fi"}}));
  const auto& tags = stream.tag_tokens();
  CHECK(tags == std::vector<std::string>{"⟨2iu⟩", "⟨2fi⟩"});
  TaggedExample ex;
  for (int i = 0; i < 20; ++i) {
    REQUIRE(stream.next(ex));
    REQUIRE(!ex.source_tokens.empty());
    const std::string& tag = ex.source_tokens[0];
    CHECK((tag == tags[0] || tag == tags[1]));
    for (std::size_t t = 1; t < ex.source_tokens.size(); ++t) {
      CHECK(ex.source_tokens[t] != tags[0]);
      CHECK(ex.source_tokens[t] != tags[1]);
    }
  }
}

TEST_CASE("constructor rejects inconsistent setups") {
  const Corpus tiny = {{"a", "b"}};
  CHECK_THROWS_AS(MixStream({}, config({{"en", "fr"}})), std::invalid_argument);
  CHECK_THROWS_AS(MixStream({{"A", "en", "fr", 1, tiny}}, config({})),
                  std::invalid_argument);
  {
    MixConfig cfg = config({{"en", "fr"}});
    cfg.tag_format = "no-placeholder";
    CHECK_THROWS_AS(MixStream({{"A", "en", "fr", 1, tiny}}, cfg), std::invalid_argument);
  }
  CHECK_THROWS_AS(MixStream({{"A", "en", "fr", 0, tiny}}, config({{"en", "fr"}})),
                  std::invalid_argument);
  CHECK_THROWS_AS(MixStream({{"A", "en", "fr", 1, Corpus{}}}, config({{"en", "fr"}})),
                  std::invalid_argument);
  CHECK_THROWS_AS(MixStream({{"A", "en", "fr", 1, tiny}, {"A", "en", "fr", 1, tiny}},
                            config({{"en", "fr"}})),
                  std::invalid_argument);
  // dataset serving no requested direction
  CHECK_THROWS_AS(MixStream({{"A", "en", "fr", 1, tiny}, {"B", "en", "de", 1, tiny}},
                            config({{"en", "fr"}})),
                  std::invalid_argument);
  // direction matched by no dataset
  CHECK_THROWS_AS(MixStream({{"A", "en", "fr", 1, tiny}},
                            config({{"en", "fr"}, {"en", "de"}})),
                  std::invalid_argument);
}

TEST_CASE("constructor rejects tag tokens hiding in the data") {
  const Corpus poisoned = {{"fine text", "evil ⟨2fr⟩ token"}};
  CHECK_THROWS_WITH_AS(MixStream({{"A", "en", "fr", 1, poisoned}}, config({{"en", "fr"}})),
                       "tag token ⟨2fr⟩ occurs in dataset A", std::invalid_argument);
}

TEST_CASE("shuffle can be disabled for corpus order") {
  std::vector<MixDatasetSpec> datasets = {
      {"A", "en", "fr", 3, numbered_corpus("a", 3)},
  };
  MixConfig cfg = config({{"en", "fr"}});
  cfg.shuffle = false;
  MixStream stream(datasets, cfg);
  TaggedExample ex;
  std::vector<std::string> sources;
  for (int i = 0; i < 3; ++i) {
    REQUIRE(stream.next(ex));
    sources.push_back(ex.source_tokens[1]);
  }
  CHECK(sources == std::vector<std::string>{"as0", "as1", "as2"});
}
