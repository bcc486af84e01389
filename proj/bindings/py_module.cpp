#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "iumix/bpe.hpp"
#include "iumix/cleaner.hpp"
#include "iumix/corpus.hpp"
#include "iumix/metrics.hpp"
#include "iumix/mixer.hpp"
#include "iumix/pipeline.hpp"
#include "iumix/translit.hpp"
#include "iumix/version.hpp"

namespace py = pybind11;

namespace {

iumix::Corpus to_corpus(const std::vector<std::pair<std::string, std::string>>& pairs) {
  iumix::Corpus corpus;
  corpus.reserve(pairs.size());
  for (const auto& [s, t] : pairs) corpus.push_back({s, t});
  return corpus;
}

std::vector<std::pair<std::string, std::string>> from_corpus(const iumix::Corpus& corpus) {
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(corpus.size());
  for (const auto& seg : corpus) pairs.emplace_back(seg.source, seg.target);
  return pairs;
}

iumix::CleanConfig make_clean_config(double min_avg, double max_avg, double max_ratio,
                                     const std::vector<std::string>& rules) {
  iumix::CleanConfig cfg;
  cfg.min_avg_token_len = min_avg;
  cfg.max_avg_token_len = max_avg;
  cfg.max_char_ratio = max_ratio;
  if (!rules.empty()) {
    cfg.rules_enabled = {false, false, false, false};
    for (const auto& name : rules) {
      const auto rule = iumix::clean_rule_from_string(name);
      if (!rule) throw std::invalid_argument("unknown rule " + name);
      cfg.rules_enabled[static_cast<int>(*rule)] = true;
    }
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Corpus preparation and multilingual mixing for English-Inuktitut NMT";
  m.attr("__version__") = iumix::kVersion;
  m.attr("DEFAULT_BPE_MARKER") = iumix::kDefaultBpeMarker;

  m.def("romanize", [](const std::string& text) { return iumix::romanize(text); },
        py::arg("text"), "Transliterate Inuktitut syllabics to roman text.");
  m.def("deromanize", [](const std::string& text) { return iumix::deromanize(text); },
        py::arg("text"), "Transliterate roman text back to syllabics.");

  m.def(
      "clean_corpus",
      [](const std::vector<std::pair<std::string, std::string>>& pairs, double min_avg,
         double max_avg, double max_ratio, const std::vector<std::string>& rules) {
        auto [kept, report] =
            iumix::clean(to_corpus(pairs), make_clean_config(min_avg, max_avg, max_ratio, rules));
        py::dict rep;
        rep["raw"] = report.raw;
        rep["selected"] = report.selected;
        rep["duplicates_removed"] = report.duplicates_removed;
        py::dict dropped;
        for (const iumix::CleanRule rule : iumix::kCleanRules) {
          dropped[std::string(iumix::to_string(rule)).c_str()] = report.dropped(rule);
        }
        rep["dropped_by_rule"] = dropped;
        return py::make_tuple(from_corpus(kept), rep);
      },
      py::arg("pairs"), py::arg("min_avg_token_len") = 1.0,
      py::arg("max_avg_token_len") = 40.0, py::arg("max_char_ratio") = 9.0,
      py::arg("rules") = std::vector<std::string>{},
      "Deduplicate and filter (source, target) pairs; returns (kept, report).");

  py::class_<iumix::BpeModel>(m, "BpeModel")
      .def(py::init<>())
      .def_readwrite("marker", &iumix::BpeModel::marker)
      .def_property_readonly("merges",
                             [](const iumix::BpeModel& model) {
                               std::vector<std::pair<std::string, std::string>> out;
                               out.reserve(model.merges.size());
                               for (const auto& mg : model.merges) {
                                 out.emplace_back(mg.left, mg.right);
                               }
                               return out;
                             })
      .def("save", &iumix::BpeModel::save, py::arg("path"))
      .def_static("load", &iumix::BpeModel::load, py::arg("path"))
      .def("__len__", [](const iumix::BpeModel& model) { return model.merges.size(); });

  m.def(
      "learn_bpe",
      [](const std::vector<std::string>& lines, std::size_t merges, const std::string& marker) {
        iumix::WordFreq words;
        for (const auto& line : lines) iumix::count_words(line, words);
        return iumix::learn_bpe(words, merges, marker);
      },
      py::arg("lines"), py::arg("merges"),
      py::arg("marker") = std::string(iumix::kDefaultBpeMarker),
      "Learn a BPE model from text lines.");

  m.def("apply_bpe", &iumix::apply_bpe, py::arg("model"), py::arg("text"),
        "Split text into subword tokens.");
  m.def(
      "detokenize",
      [](const std::vector<std::string>& tokens, const std::string& marker) {
        return iumix::detokenize(tokens, marker);
      },
      py::arg("tokens"), py::arg("marker") = std::string(iumix::kDefaultBpeMarker),
      "Join subword tokens back into text.");
  m.def(
      "build_vocab",
      [](const iumix::BpeModel& model, const std::vector<std::string>& lines) {
        iumix::WordFreq words;
        for (const auto& line : lines) iumix::count_words(line, words);
        return iumix::build_vocab(model, words).tokens;
      },
      py::arg("model"), py::arg("lines"),
      "Vocabulary over the lines, frequency-descending.");

  m.def("tokenize_13a", [](const std::string& text) { return iumix::tokenize_13a(text); },
        py::arg("text"));
  m.def(
      "corpus_bleu",
      [](const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
         const std::string& tokenizer, const std::string& smoothing) {
        if (tokenizer != "13a" && tokenizer != "none") {
          throw std::invalid_argument("tokenizer must be 13a or none");
        }
        if (smoothing != "none" && smoothing != "floor") {
          throw std::invalid_argument("smoothing must be none or floor");
        }
        const auto tok = tokenizer == "13a" ? iumix::BleuTokenizer::tok_13a
                                            : iumix::BleuTokenizer::none;
        const auto smooth = smoothing == "floor" ? iumix::BleuSmoothing::floor
                                                 : iumix::BleuSmoothing::none;
        const iumix::BleuReport report = iumix::corpus_bleu(hyps, refs, tok, smooth);
        py::dict out;
        out["score"] = report.score;
        out["precisions"] = report.precisions;
        out["brevity_penalty"] = report.brevity_penalty;
        out["hyp_len"] = report.hyp_len;
        out["ref_len"] = report.ref_len;
        out["signature"] = report.signature;
        return out;
      },
      py::arg("hyps"), py::arg("refs"), py::arg("tokenizer") = "13a",
      py::arg("smoothing") = "none", "Corpus BLEU; returns a report dict.");

  m.def(
      "run_pipeline",
      [](const std::string& config_path) {
        return iumix::run_pipeline(iumix::PipelineConfig::from_file(config_path)).dump();
      },
      py::arg("config_path"),
      "Run the full pipeline from a config file; returns the manifest as a JSON string.");
  m.def(
      "default_config",
      []() { return iumix::PipelineConfig::defaults_example().to_json().dump(2); },
      "Default pipeline config as a JSON string.");
}
