#include "iumix/corpus.hpp"

#include <fstream>
#include <stdexcept>

#include "iumix/tokens.hpp"
#include "iumix/utf8.hpp"

namespace iumix {

std::vector<std::string> load_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!utf8::is_valid(line)) {
      throw std::runtime_error(path + ":" + std::to_string(lines.size() + 1) +
                               ": invalid UTF-8");
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& line : lines) out << line << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

Corpus load_parallel(const std::string& source_path, const std::string& target_path) {
  auto src = load_lines(source_path);
  auto tgt = load_lines(target_path);
  if (src.size() != tgt.size()) {
    throw std::runtime_error("line count mismatch between " + source_path + " and " +
                             target_path + ": " + std::to_string(src.size()) + " vs " +
                             std::to_string(tgt.size()));
  }
  Corpus corpus;
  corpus.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    corpus.push_back({std::move(src[i]), std::move(tgt[i])});
  }
  return corpus;
}

NamedCorpus load_parallel(const std::string& source_path, const std::string& target_path,
                          CorpusMeta meta) {
  return {std::move(meta), load_parallel(source_path, target_path)};
}

void write_parallel(const Corpus& corpus, const std::string& source_path,
                    const std::string& target_path) {
  std::vector<std::string> src, tgt;
  src.reserve(corpus.size());
  tgt.reserve(corpus.size());
  for (const auto& seg : corpus) {
    if (seg.source.find('\n') != std::string::npos ||
        seg.target.find('\n') != std::string::npos) {
      throw std::invalid_argument("segment contains an embedded newline");
    }
    src.push_back(seg.source);
    tgt.push_back(seg.target);
  }
  write_lines(source_path, src);
  write_lines(target_path, tgt);
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.segment_count = corpus.size();
  for (const auto& seg : corpus) {
    const auto s = token_stats(seg.source);
    const auto t = token_stats(seg.target);
    stats.src_token_count += s.tokens;
    stats.src_char_count += s.chars;
    stats.tgt_token_count += t.tokens;
    stats.tgt_char_count += t.chars;
  }
  return stats;
}

}  // namespace iumix
