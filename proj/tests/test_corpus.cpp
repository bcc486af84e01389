#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "iumix/corpus.hpp"
#include "temp_dir.hpp"

using namespace iumix;

namespace {

void write_raw(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

}  // namespace

TEST_CASE("load_lines strips carriage returns and final newline") {
  TempDir dir("corpus");
  write_raw(dir / "a.txt", "one\r\ntwo\nthree");
  const auto lines = load_lines((dir / "a.txt").string());
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "one");
  CHECK(lines[1] == "two");
  CHECK(lines[2] == "three");
}

TEST_CASE("load_lines reports invalid UTF-8 with file and line") {
  TempDir dir("corpus");
  const auto path = dir / "bad.txt";
  write_raw(path, "fine\nbad\x80\n");
  CHECK_THROWS_WITH_AS(load_lines(path.string()),
                       (path.string() + ":2: invalid UTF-8").c_str(),
                       std::runtime_error);
}

TEST_CASE("load_lines rejects missing files") {
  CHECK_THROWS_AS(load_lines("/nonexistent/iumix-no-such-file"), std::runtime_error);
}

TEST_CASE("write_lines then load_lines round-trips") {
  TempDir dir("corpus");
  const std::vector<std::string> lines = {"alpha", "", "ᓄᓇᕗᑦ", "last"};
  write_lines((dir / "w.txt").string(), lines);
  CHECK(load_lines((dir / "w.txt").string()) == lines);
}

TEST_CASE("load_parallel pairs lines and rejects count mismatch") {
  TempDir dir("corpus");
  write_raw(dir / "src.txt", "s1\ns2\n");
  write_raw(dir / "tgt.txt", "t1\nt2\n");
  const Corpus corpus = load_parallel((dir / "src.txt").string(), (dir / "tgt.txt").string());
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].source == "s1");
  CHECK(corpus[0].target == "t1");
  CHECK(corpus[1].source == "s2");
  CHECK(corpus[1].target == "t2");

  write_raw(dir / "src3.txt", "a\nb\nc\n");
  const std::string expected = "line count mismatch between " + (dir / "src3.txt").string() +
                               " and " + (dir / "tgt.txt").string() + ": 3 vs 2";
  CHECK_THROWS_WITH_AS(
      load_parallel((dir / "src3.txt").string(), (dir / "tgt.txt").string()),
      expected.c_str(), std::runtime_error);
}

TEST_CASE("load_parallel carries metadata through") {
  TempDir dir("corpus");
  write_raw(dir / "src.txt", "hello\n");
  write_raw(dir / "tgt.txt", "ᐊᐃ\n");
  CorpusMeta meta;
  meta.name = "greetings";
  meta.src_lang = "en";
  meta.tgt_lang = "iu";
  meta.weight = 4;
  const NamedCorpus named =
      load_parallel((dir / "src.txt").string(), (dir / "tgt.txt").string(), meta);
  CHECK(named.meta.name == "greetings");
  CHECK(named.meta.weight == 4);
  REQUIRE(named.segments.size() == 1);
  CHECK(named.segments[0].target == "ᐊᐃ");
}

TEST_CASE("write_parallel round-trips and rejects embedded newlines") {
  TempDir dir("corpus");
  const Corpus corpus = {{"a b", "x"}, {"c", "y z"}};
  write_parallel(corpus, (dir / "s.txt").string(), (dir / "t.txt").string());
  const Corpus back = load_parallel((dir / "s.txt").string(), (dir / "t.txt").string());
  REQUIRE(back.size() == 2);
  CHECK(back[1].target == "y z");

  const Corpus bad = {{"a\nb", "x"}};
  CHECK_THROWS_AS(
      write_parallel(bad, (dir / "s2.txt").string(), (dir / "t2.txt").string()),
      std::invalid_argument);
}

TEST_CASE("corpus_stats counts tokens and codepoints per side") {
  const Corpus corpus = {{"ab cd", "abc def"}, {"ef", "ghi"}};
  const CorpusStats stats = corpus_stats(corpus);
  CHECK(stats.segment_count == 2);
  CHECK(stats.src_token_count == 3);
  CHECK(stats.tgt_token_count == 3);
  CHECK(stats.src_char_count == 6);
  CHECK(stats.tgt_char_count == 9);
  CHECK(stats.src_avg_token_len() == doctest::Approx(2.0));
  CHECK(stats.tgt_avg_token_len() == doctest::Approx(3.0));
}

TEST_CASE("corpus_stats counts syllabics as single characters") {
  const Corpus corpus = {{"ᓄᓇᕗᑦ", "nunavut"}};
  const CorpusStats stats = corpus_stats(corpus);
  CHECK(stats.src_char_count == 4);
  CHECK(stats.tgt_char_count == 7);
}

TEST_CASE("corpus_stats on empty corpus yields zero averages") {
  const CorpusStats stats = corpus_stats({});
  CHECK(stats.segment_count == 0);
  CHECK(stats.src_avg_token_len() == 0.0);
  CHECK(stats.tgt_avg_token_len() == 0.0);
}
