#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "iumix/bpe.hpp"
#include "iumix/cleaner.hpp"
#include "iumix/corpus.hpp"
#include "iumix/metrics.hpp"
#include "iumix/pipeline.hpp"
#include "iumix/tokens.hpp"
#include "iumix/translit.hpp"
#include "iumix/version.hpp"

using nlohmann::json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned threads = 1;
  bool quiet = false;
};

// Line-by-line filter running fn over stdin/stdout or the given files.
void run_filter(const std::string& input, const std::string& output,
                const std::function<std::string(const std::string&)>& fn) {
  std::istream* in = &std::cin;
  std::ifstream in_file;
  if (!input.empty()) {
    in_file.open(input, std::ios::binary);
    if (!in_file) throw std::runtime_error("cannot open " + input);
    in = &in_file;
  }
  std::ostream* out = &std::cout;
  std::ofstream out_file;
  if (!output.empty()) {
    out_file.open(output, std::ios::binary);
    if (!out_file) throw std::runtime_error("cannot open " + output + " for writing");
    out = &out_file;
  }
  std::string line;
  while (std::getline(*in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    *out << fn(line) << '\n';
  }
  if (out->fail()) throw std::runtime_error("write failed");
}

void add_io_options(CLI::App* cmd, std::string& input, std::string& output) {
  cmd->add_option("-i,--input", input, "Input file (default: stdin)");
  cmd->add_option("-o,--output", output, "Output file (default: stdout)");
}

std::string format_clean_report(const iumix::CleanReport& report) {
  std::ostringstream out;
  out << "raw=" << report.raw << '\n';
  out << "selected=" << report.selected << '\n';
  out << "duplicates_removed=" << report.duplicates_removed << '\n';
  for (const iumix::CleanRule rule : iumix::kCleanRules) {
    out << "dropped." << iumix::to_string(rule) << "=" << report.dropped(rule) << '\n';
  }
  return out.str();
}

double round_to(double value, int digits) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << value;
  return std::stod(out.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus preparation and multilingual mixing for English-Inuktitut NMT"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("iumix ") + iumix::kVersion);

  GlobalOpts global;
  app.add_option("--seed", global.seed, "Random seed for shuffling and mixing")
      ->each([&](const std::string&) { global.seed_set = true; });
  app.add_option("--threads", global.threads, "Worker threads (processing is "
                 "deterministic regardless)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", global.quiet, "Suppress progress messages");

  // romanize / deromanize
  std::string tr_input, tr_output, tr_table;
  auto* romanize_cmd = app.add_subcommand("romanize", "Syllabics to roman text");
  add_io_options(romanize_cmd, tr_input, tr_output);
  romanize_cmd->add_option("--table", tr_table, "Override transliteration table file");
  auto* deromanize_cmd = app.add_subcommand("deromanize", "Roman text to syllabics");
  add_io_options(deromanize_cmd, tr_input, tr_output);
  deromanize_cmd->add_option("--table", tr_table, "Override transliteration table file");

  // clean
  std::string cl_source, cl_target, cl_out_source, cl_out_target, cl_report;
  std::vector<std::string> cl_disabled;
  iumix::CleanConfig clean_cfg;
  auto* clean_cmd = app.add_subcommand("clean", "Deduplicate and filter a parallel corpus");
  clean_cmd->add_option("--source", cl_source, "Source-side file")->required();
  clean_cmd->add_option("--target", cl_target, "Target-side file")->required();
  clean_cmd->add_option("--out-source", cl_out_source, "Cleaned source output")->required();
  clean_cmd->add_option("--out-target", cl_out_target, "Cleaned target output")->required();
  clean_cmd->add_option("--min-avg-token-len", clean_cfg.min_avg_token_len,
                        "Minimum average token length (chars)");
  clean_cmd->add_option("--max-avg-token-len", clean_cfg.max_avg_token_len,
                        "Maximum average token length (chars)");
  clean_cmd->add_option("--max-char-ratio", clean_cfg.max_char_ratio,
                        "Maximum source/target character ratio");
  clean_cmd->add_option("--disable-rule", cl_disabled,
                        "Disable a rule (avg_token_len, identical, number_mismatch, "
                        "char_ratio); repeatable");
  clean_cmd->add_option("--report", cl_report, "Also write the report to this file");

  // learn-bpe
  std::vector<std::string> lb_inputs;
  std::string lb_model;
  std::size_t lb_merges = 12000;
  std::string lb_marker = iumix::kDefaultBpeMarker;
  auto* learn_cmd = app.add_subcommand("learn-bpe", "Learn BPE merges from text files");
  learn_cmd->add_option("files", lb_inputs, "Input text files (all lines, all files)")
      ->required();
  learn_cmd->add_option("--merges", lb_merges, "Number of merge operations");
  learn_cmd->add_option("--marker", lb_marker, "End-of-word marker symbol");
  learn_cmd->add_option("--model", lb_model, "Output model file")->required();

  // apply-bpe / detok
  std::string ab_model, ab_input, ab_output;
  auto* apply_cmd = app.add_subcommand("apply-bpe", "Split text into subword tokens");
  apply_cmd->add_option("--model", ab_model, "BPE model file")->required();
  add_io_options(apply_cmd, ab_input, ab_output);

  std::string dt_model, dt_marker, dt_input, dt_output;
  auto* detok_cmd = app.add_subcommand("detok", "Join subword tokens back into text");
  detok_cmd->add_option("--model", dt_model, "BPE model file supplying the marker");
  detok_cmd->add_option("--marker", dt_marker, "End-of-word marker symbol");
  add_io_options(detok_cmd, dt_input, dt_output);

  // mix
  std::string mix_config;
  auto* mix_cmd = app.add_subcommand(
      "mix", "Weighted many-to-many mixing of tokenized datasets into shards");
  mix_cmd->add_option("--config", mix_config, "Pipeline config file")->required();

  // score
  std::string sc_hyp, sc_ref, sc_tok = "13a", sc_smooth = "none", sc_report;
  auto* score_cmd = app.add_subcommand("score", "Corpus BLEU of hypotheses vs references");
  score_cmd->add_option("--hyp", sc_hyp, "Hypothesis file")->required();
  score_cmd->add_option("--ref", sc_ref, "Reference file")->required();
  score_cmd->add_option("--tok", sc_tok, "Tokenizer: 13a or none")
      ->check(CLI::IsMember({"13a", "none"}));
  score_cmd->add_option("--smooth", sc_smooth, "Smoothing: none or floor")
      ->check(CLI::IsMember({"none", "floor"}));
  score_cmd->add_option("--report", sc_report, "Write a JSON report to this file");

  // stats
  std::string st_source, st_target;
  auto* stats_cmd = app.add_subcommand("stats", "Token and character counts of a corpus");
  stats_cmd->add_option("--source", st_source, "Source-side file")->required();
  stats_cmd->add_option("--target", st_target, "Target-side file")->required();

  // run
  std::string run_config;
  auto* run_cmd = app.add_subcommand("run", "Execute the full pipeline from a config");
  run_cmd->add_option("--config", run_config, "Pipeline config file")->required();

  // config
  bool cfg_defaults = false;
  std::string cfg_validate;
  auto* config_cmd = app.add_subcommand("config", "Inspect or validate pipeline configs");
  config_cmd->add_flag("--defaults", cfg_defaults, "Print a default config");
  config_cmd->add_option("--validate", cfg_validate, "Parse and validate a config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*romanize_cmd || *deromanize_cmd) {
      const iumix::TranslitTable* table = &iumix::TranslitTable::builtin();
      std::unique_ptr<iumix::TranslitTable> override_table;
      if (!tr_table.empty()) {
        override_table =
            std::make_unique<iumix::TranslitTable>(iumix::TranslitTable::from_file(tr_table));
        table = override_table.get();
      }
      const bool forward = static_cast<bool>(*romanize_cmd);
      run_filter(tr_input, tr_output, [&](const std::string& line) {
        return forward ? table->romanize(line) : table->deromanize(line);
      });
    } else if (*clean_cmd) {
      for (const auto& name : cl_disabled) {
        const auto rule = iumix::clean_rule_from_string(name);
        if (!rule) throw std::invalid_argument("unknown rule " + name);
        clean_cfg.rules_enabled[static_cast<int>(*rule)] = false;
      }
      auto corpus = iumix::load_parallel(cl_source, cl_target);
      auto [kept, report] = iumix::clean(std::move(corpus), clean_cfg);
      iumix::write_parallel(kept, cl_out_source, cl_out_target);
      const std::string text = format_clean_report(report);
      std::cout << text;
      if (!cl_report.empty()) {
        std::ofstream out(cl_report, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + cl_report + " for writing");
        out << text;
      }
    } else if (*learn_cmd) {
      iumix::WordFreq words;
      for (const auto& path : lb_inputs) {
        for (const auto& line : iumix::load_lines(path)) {
          iumix::count_words(line, words);
        }
      }
      const iumix::BpeModel model = iumix::learn_bpe(words, lb_merges, lb_marker);
      model.save(lb_model);
      if (!global.quiet) {
        std::cerr << "learned " << model.merges.size() << " merges -> " << lb_model
                  << '\n';
      }
    } else if (*apply_cmd) {
      const iumix::BpeModel model = iumix::BpeModel::load(ab_model);
      iumix::BpeApplier applier(model);
      run_filter(ab_input, ab_output, [&](const std::string& line) {
        std::string out;
        for (const auto& tok : applier.apply(line)) {
          if (!out.empty()) out += ' ';
          out += tok;
        }
        return out;
      });
    } else if (*detok_cmd) {
      std::string marker = iumix::kDefaultBpeMarker;
      if (!dt_model.empty()) {
        marker = iumix::BpeModel::load(dt_model).marker;
      }
      if (!dt_marker.empty()) marker = dt_marker;
      run_filter(dt_input, dt_output, [&](const std::string& line) {
        std::vector<std::string> tokens;
        iumix::for_each_token(line, [&](std::string_view t) { tokens.emplace_back(t); });
        return iumix::detokenize(tokens, marker);
      });
    } else if (*mix_cmd || *run_cmd) {
      auto cfg = iumix::PipelineConfig::from_file(*mix_cmd ? mix_config : run_config);
      if (global.seed_set) cfg.seed = global.seed;
      if (*mix_cmd) cfg.stages = {"mix"};
      std::ostream* log = global.quiet ? nullptr : &std::cerr;
      iumix::run_pipeline(cfg, log);
      std::cout << cfg.output_dir << "/manifest.json" << '\n';
    } else if (*score_cmd) {
      const auto hyps = iumix::load_lines(sc_hyp);
      const auto refs = iumix::load_lines(sc_ref);
      const auto tok = sc_tok == "13a" ? iumix::BleuTokenizer::tok_13a
                                       : iumix::BleuTokenizer::none;
      const auto smooth = sc_smooth == "none" ? iumix::BleuSmoothing::none
                                              : iumix::BleuSmoothing::floor;
      const iumix::BleuReport report = iumix::corpus_bleu(hyps, refs, tok, smooth);
      std::ostringstream line;
      line.precision(1);
      line << std::fixed << "BLEU = " << report.score << ' ';
      for (std::size_t n = 0; n < 4; ++n) {
        line << (n ? "/" : "") << report.precisions[n] * 100.0;
      }
      line.precision(3);
      line << " (BP = " << report.brevity_penalty << ", hyp_len = " << report.hyp_len
           << ", ref_len = " << report.ref_len << ") " << report.signature;
      std::cout << line.str() << '\n';
      if (!sc_report.empty()) {
        json doc;
        doc["score"] = report.score;
        doc["precisions"] = report.precisions;
        doc["brevity_penalty"] = report.brevity_penalty;
        doc["hyp_len"] = report.hyp_len;
        doc["ref_len"] = report.ref_len;
        doc["signature"] = report.signature;
        std::ofstream out(sc_report, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + sc_report + " for writing");
        out << doc.dump(2) << '\n';
      }
    } else if (*stats_cmd) {
      const auto corpus = iumix::load_parallel(st_source, st_target);
      const iumix::CorpusStats stats = iumix::corpus_stats(corpus);
      std::cout << "segments=" << stats.segment_count << '\n'
                << "source.tokens=" << stats.src_token_count << '\n'
                << "source.chars=" << stats.src_char_count << '\n'
                << "source.avg_token_len=" << round_to(stats.src_avg_token_len(), 4) << '\n'
                << "target.tokens=" << stats.tgt_token_count << '\n'
                << "target.chars=" << stats.tgt_char_count << '\n'
                << "target.avg_token_len=" << round_to(stats.tgt_avg_token_len(), 4) << '\n';
    } else if (*config_cmd) {
      if (cfg_defaults != cfg_validate.empty()) {
        throw std::invalid_argument("config: pass exactly one of --defaults or --validate");
      }
      if (cfg_defaults) {
        std::cout << iumix::PipelineConfig::defaults_example().to_json().dump(2) << '\n';
      } else {
        iumix::PipelineConfig::from_file(cfg_validate).validate();
        std::cout << "ok" << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
