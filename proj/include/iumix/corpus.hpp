#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace iumix {

struct ParallelSegment {
  std::string source;
  std::string target;
};

using Corpus = std::vector<ParallelSegment>;

struct CorpusMeta {
  std::string name;
  std::string src_lang;
  std::string tgt_lang;
  std::uint64_t weight = 1;
};

struct NamedCorpus {
  CorpusMeta meta;
  Corpus segments;
};

struct CorpusStats {
  std::uint64_t segment_count = 0;
  std::uint64_t src_token_count = 0;
  std::uint64_t tgt_token_count = 0;
  std::uint64_t src_char_count = 0;  // codepoints inside tokens
  std::uint64_t tgt_char_count = 0;

  double src_avg_token_len() const {
    return src_token_count == 0
               ? 0.0
               : static_cast<double>(src_char_count) / static_cast<double>(src_token_count);
  }
  double tgt_avg_token_len() const {
    return tgt_token_count == 0
               ? 0.0
               : static_cast<double>(tgt_char_count) / static_cast<double>(tgt_token_count);
  }
};

std::vector<std::string> load_lines(const std::string& path);
void write_lines(const std::string& path, const std::vector<std::string>& lines);

// One segment per line, pairing line i of each file; a trailing '\r' is
// stripped. Throws std::runtime_error on unreadable files, mismatched line
// counts ("N vs M"), or invalid UTF-8 (naming file and 1-based line).
Corpus load_parallel(const std::string& source_path, const std::string& target_path);
NamedCorpus load_parallel(const std::string& source_path, const std::string& target_path,
                          CorpusMeta meta);

// Inverse of load_parallel for corpora without embedded newlines; a segment
// containing one throws std::invalid_argument.
void write_parallel(const Corpus& corpus, const std::string& source_path,
                    const std::string& target_path);

CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace iumix
