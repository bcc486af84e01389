#include "iumix/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "iumix/metrics.hpp"
#include "iumix/rng.hpp"
#include "iumix/translit.hpp"
#include "iumix/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace iumix {

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << v;
  return out.str();
}

std::uint64_t file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a64(buf.str());
}

ExhaustionPolicy policy_from_string(const std::string& name) {
  if (name == "restart") return ExhaustionPolicy::restart;
  if (name == "stop") return ExhaustionPolicy::stop;
  throw std::invalid_argument("exhaustion_policy must be restart or stop, got " + name);
}

std::string policy_to_string(ExhaustionPolicy policy) {
  return policy == ExhaustionPolicy::restart ? "restart" : "stop";
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

// Removes everything this run created, in reverse creation order.
struct OutputTracker {
  std::vector<fs::path> files;
  fs::path dir;
  bool created_dir = false;
  bool keep = false;

  ~OutputTracker() {
    if (keep) return;
    for (auto it = files.rbegin(); it != files.rend(); ++it) {
      std::error_code ec;
      fs::remove(*it, ec);
    }
    if (created_dir) {
      std::error_code ec;
      fs::remove(dir, ec);
    }
  }
};

class ShardWriter {
 public:
  ShardWriter(const fs::path& dir, std::uint64_t shard_size, OutputTracker& tracker)
      : dir_(dir), shard_size_(shard_size), tracker_(tracker) {}

  void write(const TaggedExample& ex) {
    if (!out_.is_open()) open_next();
    bool first = true;
    for (const auto& t : ex.source_tokens) {
      if (!first) out_ << ' ';
      out_ << t;
      first = false;
    }
    out_ << '\t';
    first = true;
    for (const auto& t : ex.target_tokens) {
      if (!first) out_ << ' ';
      out_ << t;
      first = false;
    }
    out_ << '\n';
    ++in_shard_;
    ++total_;
    if (in_shard_ == shard_size_) close_current();
  }

  void finish() {
    if (out_.is_open()) close_current();
  }

  const std::vector<std::pair<std::string, std::uint64_t>>& shards() const {
    return shards_;
  }
  std::uint64_t total() const { return total_; }

 private:
  void open_next() {
    char name[32];
    std::snprintf(name, sizeof(name), "train.%05zu.tsv", shards_.size());
    current_ = dir_ / name;
    out_.open(current_, std::ios::binary);
    if (!out_) throw std::runtime_error("cannot open " + current_.string());
    tracker_.files.push_back(current_);
    shards_.emplace_back(name, 0);
    in_shard_ = 0;
  }

  void close_current() {
    out_.close();
    if (out_.fail()) throw std::runtime_error("write failed: " + current_.string());
    shards_.back().second = in_shard_;
    in_shard_ = 0;
  }

  fs::path dir_;
  std::uint64_t shard_size_;
  OutputTracker& tracker_;
  std::ofstream out_;
  fs::path current_;
  std::uint64_t in_shard_ = 0;
  std::uint64_t total_ = 0;
  std::vector<std::pair<std::string, std::uint64_t>> shards_;
};

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::romanize: return "romanize";
    case Stage::clean: return "clean";
    case Stage::bpe: return "bpe";
    case Stage::mix: return "mix";
  }
  return "unknown";
}

PipelineConfig PipelineConfig::defaults_example() {
  PipelineConfig cfg;
  cfg.output_dir = "out";
  cfg.datasets.push_back({"hansard", "hansard.en", "hansard.iu", "en", "iu", 15});
  cfg.directions = {{"en", "iu"}, {"iu", "en"}};
  cfg.cycles = 1000;
  return cfg;
}

PipelineConfig PipelineConfig::from_json(const json& doc) {
  PipelineConfig cfg;
  cfg.datasets.clear();
  if (!doc.is_object()) throw std::invalid_argument("config root must be an object");

  cfg.seed = doc.value("seed", cfg.seed);
  cfg.output_dir = doc.value("output_dir", cfg.output_dir);
  if (doc.contains("stages")) {
    cfg.stages = doc.at("stages").get<std::vector<std::string>>();
  }
  if (doc.contains("datasets")) {
    for (const auto& d : doc.at("datasets")) {
      DatasetEntry e;
      e.name = d.at("name").get<std::string>();
      e.source_path = d.at("source").get<std::string>();
      e.target_path = d.at("target").get<std::string>();
      e.src_lang = d.at("src_lang").get<std::string>();
      e.tgt_lang = d.at("tgt_lang").get<std::string>();
      e.weight = d.value("weight", std::uint64_t{1});
      cfg.datasets.push_back(std::move(e));
    }
  }
  if (doc.contains("romanize")) {
    const auto& r = doc.at("romanize");
    if (r.contains("langs")) {
      cfg.romanize_langs = r.at("langs").get<std::vector<std::string>>();
    }
  }
  if (doc.contains("clean")) {
    const auto& c = doc.at("clean");
    cfg.clean.min_avg_token_len = c.value("min_avg_token_len", cfg.clean.min_avg_token_len);
    cfg.clean.max_avg_token_len = c.value("max_avg_token_len", cfg.clean.max_avg_token_len);
    cfg.clean.max_char_ratio = c.value("max_char_ratio", cfg.clean.max_char_ratio);
    cfg.global_dedup = c.value("global_dedup", cfg.global_dedup);
    if (c.contains("rules")) {
      cfg.clean.rules_enabled = {false, false, false, false};
      for (const auto& name : c.at("rules")) {
        const auto rule = clean_rule_from_string(name.get<std::string>());
        if (!rule) {
          throw std::invalid_argument("unknown clean rule " + name.get<std::string>());
        }
        cfg.clean.rules_enabled[static_cast<int>(*rule)] = true;
      }
    }
  }
  if (doc.contains("bpe")) {
    const auto& b = doc.at("bpe");
    cfg.bpe_merges = b.value("merges", cfg.bpe_merges);
    cfg.bpe_marker = b.value("marker", cfg.bpe_marker);
  }
  if (doc.contains("mix")) {
    const auto& m = doc.at("mix");
    if (m.contains("directions")) {
      for (const auto& d : m.at("directions")) {
        if (!d.is_array() || d.size() != 2) {
          throw std::invalid_argument("each direction must be [src, tgt]");
        }
        cfg.directions.push_back({d.at(0).get<std::string>(), d.at(1).get<std::string>()});
      }
    }
    cfg.tag_format = m.value("tag_format", cfg.tag_format);
    if (m.contains("exhaustion_policy")) {
      cfg.policy = policy_from_string(m.at("exhaustion_policy").get<std::string>());
    }
    cfg.shuffle = m.value("shuffle", cfg.shuffle);
    cfg.cycles = m.value("cycles", cfg.cycles);
  }
  cfg.shard_size = doc.value("shard_size", cfg.shard_size);
  return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return from_json(doc);
}

json PipelineConfig::to_json() const {
  json doc;
  doc["seed"] = seed;
  doc["output_dir"] = output_dir;
  doc["stages"] = stages;
  doc["datasets"] = json::array();
  for (const auto& d : datasets) {
    doc["datasets"].push_back({{"name", d.name},
                               {"source", d.source_path},
                               {"target", d.target_path},
                               {"src_lang", d.src_lang},
                               {"tgt_lang", d.tgt_lang},
                               {"weight", d.weight}});
  }
  doc["romanize"] = {{"langs", romanize_langs}};
  json rules = json::array();
  for (const CleanRule rule : kCleanRules) {
    if (clean.enabled(rule)) rules.push_back(std::string(to_string(rule)));
  }
  doc["clean"] = {{"min_avg_token_len", clean.min_avg_token_len},
                  {"max_avg_token_len", clean.max_avg_token_len},
                  {"max_char_ratio", clean.max_char_ratio},
                  {"rules", rules},
                  {"global_dedup", global_dedup}};
  doc["bpe"] = {{"merges", bpe_merges}, {"marker", bpe_marker}};
  json dirs = json::array();
  for (const auto& d : directions) dirs.push_back({d.src, d.tgt});
  doc["mix"] = {{"directions", dirs},
                {"tag_format", tag_format},
                {"exhaustion_policy", policy_to_string(policy)},
                {"shuffle", shuffle},
                {"cycles", cycles}};
  doc["shard_size"] = shard_size;
  return doc;
}

void PipelineConfig::validate() const {
  if (output_dir.empty()) throw std::invalid_argument("output_dir is required");
  if (datasets.empty()) throw std::invalid_argument("at least one dataset is required");

  if (stages.empty()) throw std::invalid_argument("stages must not be empty");
  std::size_t order_pos = 0;
  for (const auto& s : stages) {
    std::size_t found = kStageOrder.size();
    for (std::size_t i = order_pos; i < kStageOrder.size(); ++i) {
      if (to_string(kStageOrder[i]) == s) {
        found = i;
        break;
      }
    }
    if (found == kStageOrder.size()) {
      bool known = false;
      for (const Stage st : kStageOrder) known |= to_string(st) == s;
      if (!known) throw std::invalid_argument("unknown stage " + s);
      throw std::invalid_argument("stage " + s + " is out of order; stages must follow "
                                  "romanize, clean, bpe, mix");
    }
    order_pos = found + 1;
  }

  std::unordered_set<std::string> names;
  for (const auto& d : datasets) {
    if (d.name.empty()) throw std::invalid_argument("dataset name must not be empty");
    if (!names.insert(d.name).second) {
      throw std::invalid_argument("duplicate dataset name " + d.name);
    }
    if (d.weight == 0) {
      throw std::invalid_argument("dataset " + d.name + ": weight must be positive");
    }
    for (const auto* p : {&d.source_path, &d.target_path}) {
      if (!fs::exists(*p)) {
        throw std::runtime_error("dataset " + d.name + ": missing file " + *p);
      }
    }
  }

  clean.validate();
  if (directions.empty()) throw std::invalid_argument("mix.directions is required");
  if (tag_format.find("{lang}") == std::string::npos) {
    throw std::invalid_argument("tag_format must contain {lang}");
  }
  for (const auto& dir : directions) {
    bool satisfiable = false;
    for (const auto& d : datasets) {
      satisfiable |= (dir.src == d.src_lang && dir.tgt == d.tgt_lang) ||
                     (dir.src == d.tgt_lang && dir.tgt == d.src_lang);
    }
    if (!satisfiable) {
      throw std::invalid_argument("direction " + dir.src + "-" + dir.tgt +
                                  " matches no dataset");
    }
  }
  if (policy == ExhaustionPolicy::restart && cycles == 0) {
    throw std::invalid_argument("mix.cycles must be positive under the restart policy");
  }
  if (shard_size == 0) throw std::invalid_argument("shard_size must be positive");
}

json run_pipeline(const PipelineConfig& cfg, std::ostream* log) {
  cfg.validate();
  const auto say = [&](const std::string& msg) {
    if (log) *log << msg << '\n';
  };

  const fs::path out_dir(cfg.output_dir);
  if (fs::exists(out_dir)) {
    if (!fs::is_directory(out_dir)) {
      throw std::runtime_error(cfg.output_dir + " exists and is not a directory");
    }
    if (!fs::is_empty(out_dir)) {
      throw std::runtime_error("output directory " + cfg.output_dir + " is not empty");
    }
  }

  OutputTracker tracker;
  tracker.dir = out_dir;
  if (!fs::exists(out_dir)) {
    fs::create_directories(out_dir);
    tracker.created_dir = true;
  }

  const fs::path lock_path = out_dir / ".lock";
  {
    std::ofstream lock(lock_path, std::ios::binary);
    if (!lock) throw std::runtime_error("cannot create lock file " + lock_path.string());
    tracker.files.push_back(lock_path);
  }

  const auto enabled = [&](Stage stage) {
    for (const auto& s : cfg.stages) {
      if (to_string(stage) == s) return true;
    }
    return false;
  };

  json manifest;
  manifest["tool_version"] = kVersion;
  manifest["seed"] = cfg.seed;
  json stage_record;
  for (const Stage stage : kStageOrder) {
    stage_record[std::string(to_string(stage))] = enabled(stage) ? "run" : "skipped";
  }
  manifest["stages"] = stage_record;

  // Load.
  std::vector<Corpus> corpora;
  corpora.reserve(cfg.datasets.size());
  for (const auto& d : cfg.datasets) {
    say("loading " + d.name);
    corpora.push_back(load_parallel(d.source_path, d.target_path));
  }

  // Romanize.
  if (enabled(Stage::romanize)) {
    const auto wants = [&](const std::string& lang) {
      return std::find(cfg.romanize_langs.begin(), cfg.romanize_langs.end(), lang) !=
             cfg.romanize_langs.end();
    };
    for (std::size_t i = 0; i < corpora.size(); ++i) {
      const auto& d = cfg.datasets[i];
      const bool src = wants(d.src_lang);
      const bool tgt = wants(d.tgt_lang);
      if (!src && !tgt) continue;
      say("romanizing " + d.name);
      for (auto& seg : corpora[i]) {
        if (src) seg.source = romanize(seg.source);
        if (tgt) seg.target = romanize(seg.target);
      }
    }
  }

  // Clean.
  json clean_reports = json::object();
  if (enabled(Stage::clean)) {
    std::unordered_set<std::string> global_seen;
    for (std::size_t i = 0; i < corpora.size(); ++i) {
      const auto& d = cfg.datasets[i];
      say("cleaning " + d.name);
      auto [kept, report] =
          clean(std::move(corpora[i]), cfg.clean,
                cfg.global_dedup ? &global_seen : nullptr);
      corpora[i] = std::move(kept);
      if (corpora[i].empty()) {
        throw std::runtime_error("dataset " + d.name + " has no segments left after "
                                 "cleaning");
      }
      json rules = json::object();
      for (const CleanRule rule : kCleanRules) {
        rules[std::string(to_string(rule))] = report.dropped(rule);
      }
      clean_reports[d.name] = {{"raw", report.raw},
                               {"selected", report.selected},
                               {"duplicates_removed", report.duplicates_removed},
                               {"dropped_by_rule", rules}};
    }
  }
  manifest["clean"] = clean_reports;

  // BPE.
  BpeModel model;
  model.marker = cfg.bpe_marker;
  Vocab vocab;
  json bpe_record = json::object();
  const fs::path model_path = out_dir / "bpe.model";
  const fs::path vocab_path = out_dir / "vocab.txt";
  std::vector<std::string> tags;
  {
    std::unordered_set<std::string> seen;
    for (const auto& dir : cfg.directions) {
      const std::string tag = make_tag(cfg.tag_format, dir.tgt);
      if (seen.insert(tag).second) tags.push_back(tag);
    }
  }
  if (enabled(Stage::bpe)) {
    say("learning BPE (" + std::to_string(cfg.bpe_merges) + " merges requested)");
    const WordFreq words = count_words(corpora);
    model = learn_bpe(words, cfg.bpe_merges, cfg.bpe_marker);
    model.save(model_path.string());
    tracker.files.push_back(model_path);

    vocab = build_vocab(model, words);
    for (const auto& tag : tags) {
      if (vocab.ids.count(tag)) {
        throw std::runtime_error("tag token " + tag + " collides with a vocabulary "
                                 "token; change tag_format");
      }
    }
    {
      std::ofstream out(vocab_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open " + vocab_path.string());
      for (const auto& t : vocab.tokens) out << t << '\n';
      for (const auto& tag : tags) out << tag << '\n';
      if (!out) throw std::runtime_error("write failed: " + vocab_path.string());
      tracker.files.push_back(vocab_path);
    }

    say("applying BPE");
    BpeApplier applier(model);
    for (auto& corpus : corpora) {
      for (auto& seg : corpus) {
        seg.source = join_tokens(applier.apply(seg.source));
        seg.target = join_tokens(applier.apply(seg.target));
      }
    }

    bpe_record = {{"merges_requested", cfg.bpe_merges},
                  {"merges_learned", model.merges.size()},
                  {"marker", model.marker},
                  {"model_digest", hex64(file_digest(model_path))},
                  {"base_vocab_size", vocab.size()},
                  {"vocab_size", vocab.size() + tags.size()}};
  }
  manifest["bpe"] = bpe_record;

  // Mix.
  json mix_record = json::object();
  json shard_list = json::array();
  if (enabled(Stage::mix)) {
    say("mixing");
    MixConfig mix_cfg;
    mix_cfg.directions = cfg.directions;
    mix_cfg.tag_format = cfg.tag_format;
    mix_cfg.seed = cfg.seed;
    mix_cfg.policy = cfg.policy;
    mix_cfg.shuffle = cfg.shuffle;

    std::vector<MixDatasetSpec> specs;
    specs.reserve(cfg.datasets.size());
    for (std::size_t i = 0; i < corpora.size(); ++i) {
      const auto& d = cfg.datasets[i];
      specs.push_back({d.name, d.src_lang, d.tgt_lang, d.weight, std::move(corpora[i])});
    }
    MixStream stream(std::move(specs), mix_cfg);

    ShardWriter writer(out_dir, cfg.shard_size, tracker);
    TaggedExample ex;
    while (stream.next(ex)) {
      writer.write(ex);
      if (cfg.cycles > 0 && stream.totals().cycles >= cfg.cycles) break;
    }
    writer.finish();

    json per_dataset = json::object();
    for (const auto& [name, count] : stream.totals().per_dataset) {
      per_dataset[name] = count;
    }
    json dirs = json::array();
    for (const auto& d : cfg.directions) dirs.push_back({d.src, d.tgt});
    mix_record = {{"cycle_length", stream.cycle_length()},
                  {"cycles", stream.totals().cycles},
                  {"examples", stream.totals().examples},
                  {"per_dataset", per_dataset},
                  {"exhaustion_policy", policy_to_string(cfg.policy)},
                  {"directions", dirs},
                  {"tag_tokens", stream.tag_tokens()},
                  {"shuffle", cfg.shuffle}};
    for (const auto& [name, count] : writer.shards()) {
      shard_list.push_back({{"file", name},
                            {"examples", count},
                            {"digest", hex64(file_digest(out_dir / name))}});
    }
  }
  manifest["mix"] = mix_record;
  manifest["shards"] = shard_list;

  // Training config (documentation artifact consumed by an external trainer).
  const fs::path train_cfg_path = out_dir / "training.cfg";
  {
    std::ofstream out(train_cfg_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + train_cfg_path.string());
    out << "# consumed by an external trainer; records the intended setup\n";
    out << "model=transformer_medium\n";
    out << "heads=12\n";
    out << "model_dim=768\n";
    out << "ff_dim=3072\n";
    out << "train_steps=100000\n";
    out << "batch_tokens_initial=50000\n";
    out << "batch_tokens_final=200000\n";
    out << "averaging=exponential_moving_average\n";
    out << "beam_size=5\n";
    out << "length_penalty=average\n";
    out << "seed=" << cfg.seed << "\n";
    if (enabled(Stage::bpe)) {
      out << "vocab=vocab.txt\n";
      out << "vocab_size=" << vocab.size() + tags.size() << "\n";
      out << "bpe_model=bpe.model\n";
    }
    out << "shards=";
    for (std::size_t i = 0; i < shard_list.size(); ++i) {
      if (i) out << ',';
      out << shard_list[i]["file"].get<std::string>();
    }
    out << "\n";
    if (!out) throw std::runtime_error("write failed: " + train_cfg_path.string());
    tracker.files.push_back(train_cfg_path);
  }
  manifest["training_config"] = "training.cfg";

  // Manifest last; a temp-file rename makes its presence mark success.
  const fs::path manifest_path = out_dir / "manifest.json";
  const fs::path manifest_tmp = out_dir / "manifest.json.tmp";
  {
    std::ofstream out(manifest_tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + manifest_tmp.string());
    out << manifest.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + manifest_tmp.string());
  }
  fs::rename(manifest_tmp, manifest_path);

  std::error_code ec;
  fs::remove(lock_path, ec);
  tracker.keep = true;
  say("done: " + manifest_path.string());
  return manifest;
}

}  // namespace iumix
