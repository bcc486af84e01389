#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "iumix/bpe.hpp"
#include "iumix/cleaner.hpp"
#include "iumix/mixer.hpp"

namespace iumix {

enum class Stage { romanize, clean, bpe, mix };

inline constexpr std::array<Stage, 4> kStageOrder = {Stage::romanize, Stage::clean,
                                                     Stage::bpe, Stage::mix};

std::string_view to_string(Stage stage);

struct DatasetEntry {
  std::string name;
  std::string source_path;
  std::string target_path;
  std::string src_lang;
  std::string tgt_lang;
  std::uint64_t weight = 1;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::string output_dir;
  // Subset of romanize, clean, bpe, mix; must keep that order. Omitted
  // stages are skipped and the skip recorded in the manifest.
  std::vector<std::string> stages = {"romanize", "clean", "bpe", "mix"};
  std::vector<DatasetEntry> datasets;

  std::vector<std::string> romanize_langs = {"iu"};

  CleanConfig clean;
  bool global_dedup = false;

  std::size_t bpe_merges = 12000;
  std::string bpe_marker = kDefaultBpeMarker;

  std::vector<Direction> directions;
  std::string tag_format = "⟨2{lang}⟩";
  ExhaustionPolicy policy = ExhaustionPolicy::restart;
  bool shuffle = true;
  std::uint64_t cycles = 0;  // emitted cycle count; 0 = run to stop-exhaustion

  std::uint64_t shard_size = 100000;

  static PipelineConfig defaults_example();
  static PipelineConfig from_json(const nlohmann::json& doc);
  static PipelineConfig from_file(const std::string& path);
  nlohmann::json to_json() const;

  // Structural checks plus input-path existence; throws std::invalid_argument
  // or std::runtime_error without touching the output directory.
  void validate() const;
};

// romanize -> clean -> learn/apply BPE -> tag+mix -> shards, vocab, model,
// training config, manifest (written last, atomically). The output
// directory must be new or empty and is locked for the duration; on any
// stage failure everything written is removed. Returns the manifest.
nlohmann::json run_pipeline(const PipelineConfig& cfg, std::ostream* log = nullptr);

}  // namespace iumix
