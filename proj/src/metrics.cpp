#include "iumix/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "iumix/tokens.hpp"
#include "iumix/utf8.hpp"
#include "iumix/version.hpp"

namespace iumix {

namespace {

constexpr double kFloorValue = 0.01;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// [{-~[-` -&(-+:-@/] from mteval-v13a.
bool is_13a_punct(char c) {
  const auto b = static_cast<unsigned char>(c);
  return (b >= 0x20 && b <= 0x26) || (b >= 0x28 && b <= 0x2B) || b == 0x2F ||
         (b >= 0x3A && b <= 0x40) || (b >= 0x5B && b <= 0x60) ||
         (b >= 0x7B && b <= 0x7E);
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, from.size(), from) == 0) {
      out += to;
      i += from.size();
    } else {
      out += s[i];
      ++i;
    }
  }
  s = std::move(out);
}

// Python \s over str, as used by the reference scorer's final collapse.
bool is_py_space(char32_t cp) {
  return utf8::is_space(cp) || (cp >= 0x1C && cp <= 0x1F);
}

}  // namespace

std::vector<std::string> tokenize_13a(std::string_view text) {
  std::string norm(text);
  replace_all(norm, "<skipped>", "");
  replace_all(norm, "-\n", "");
  replace_all(norm, "\n", " ");
  replace_all(norm, "&quot;", "\"");
  replace_all(norm, "&amp;", "&");
  replace_all(norm, "&lt;", "<");
  replace_all(norm, "&gt;", ">");

  std::string pass;
  pass.reserve(norm.size() * 2);
  for (const char c : norm) {
    if (is_13a_punct(c)) {
      pass += ' ';
      pass += c;
      pass += ' ';
    } else {
      pass += c;
    }
  }
  norm = std::move(pass);

  // The three substitutions below consume both matched characters before
  // rescanning, exactly like the reference regex engine.
  pass.clear();
  for (std::size_t i = 0; i < norm.size();) {
    if (!is_digit(norm[i]) && i + 1 < norm.size() &&
        (norm[i + 1] == '.' || norm[i + 1] == ',')) {
      pass += norm[i];
      pass += ' ';
      pass += norm[i + 1];
      pass += ' ';
      i += 2;
    } else {
      pass += norm[i];
      ++i;
    }
  }
  norm = std::move(pass);

  pass.clear();
  for (std::size_t i = 0; i < norm.size();) {
    if ((norm[i] == '.' || norm[i] == ',') && i + 1 < norm.size() &&
        !is_digit(norm[i + 1])) {
      pass += ' ';
      pass += norm[i];
      pass += ' ';
      pass += norm[i + 1];
      i += 2;
    } else {
      pass += norm[i];
      ++i;
    }
  }
  norm = std::move(pass);

  pass.clear();
  for (std::size_t i = 0; i < norm.size();) {
    if (is_digit(norm[i]) && i + 1 < norm.size() && norm[i + 1] == '-') {
      pass += norm[i];
      pass += " - ";
      i += 2;
    } else {
      pass += norm[i];
      ++i;
    }
  }
  norm = std::move(pass);

  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < norm.size()) {
    char32_t cp = 0;
    const std::size_t len = utf8::decode(norm, i, cp);
    const std::size_t step = len == 0 ? 1 : len;
    if (len != 0 && is_py_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.append(norm, i, step);
    }
    i += step;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

BleuReport corpus_bleu(const std::vector<std::string>& hyps,
                       const std::vector<std::string>& refs,
                       BleuTokenizer tokenizer, BleuSmoothing smoothing) {
  if (hyps.size() != refs.size()) {
    throw std::invalid_argument("hypothesis/reference length mismatch: " +
                                std::to_string(hyps.size()) + " vs " +
                                std::to_string(refs.size()));
  }

  const auto split = [&](const std::string& text) {
    if (tokenizer == BleuTokenizer::tok_13a) return tokenize_13a(text);
    std::vector<std::string> tokens;
    for_each_token(text, [&](std::string_view t) { tokens.emplace_back(t); });
    return tokens;
  };

  std::array<std::uint64_t, 4> num = {0, 0, 0, 0};
  std::array<std::uint64_t, 4> den = {0, 0, 0, 0};
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;

  std::unordered_map<std::string, std::uint64_t> hyp_grams, ref_grams;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    const auto hyp = split(hyps[s]);
    const auto ref = split(refs[s]);
    hyp_len += hyp.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      if (hyp.size() >= n) den[n - 1] += hyp.size() - n + 1;
      if (hyp.size() < n || ref.size() < n) continue;
      hyp_grams.clear();
      ref_grams.clear();
      std::string gram;
      for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
        gram = hyp[i];
        for (std::size_t k = 1; k < n; ++k) {
          gram += ' ';
          gram += hyp[i + k];
        }
        ++hyp_grams[gram];
      }
      for (std::size_t i = 0; i + n <= ref.size(); ++i) {
        gram = ref[i];
        for (std::size_t k = 1; k < n; ++k) {
          gram += ' ';
          gram += ref[i + k];
        }
        ++ref_grams[gram];
      }
      for (const auto& [g, count] : hyp_grams) {
        const auto it = ref_grams.find(g);
        if (it != ref_grams.end()) num[n - 1] += std::min(count, it->second);
      }
    }
  }

  if (hyp_len == 0) {
    throw std::invalid_argument("hypothesis corpus has no tokens");
  }

  BleuReport report;
  report.hyp_len = hyp_len;
  report.ref_len = ref_len;
  report.brevity_penalty =
      hyp_len >= ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));

  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 0; n < 4; ++n) {
    double p = 0.0;
    if (den[n] > 0) {
      double effective = static_cast<double>(num[n]);
      if (smoothing == BleuSmoothing::floor && num[n] == 0) effective = kFloorValue;
      p = effective / static_cast<double>(den[n]);
    }
    report.precisions[n] = p;
    if (p <= 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  report.score = zero ? 0.0
                      : 100.0 * report.brevity_penalty * std::exp(log_sum / 4.0);

  report.signature = std::string("BLEU+tok.") +
                     (tokenizer == BleuTokenizer::tok_13a ? "13a" : "none") +
                     "+smooth." +
                     (smoothing == BleuSmoothing::none ? "none" : "floor") +
                     "+numrefs.1+version." + kVersion;
  return report;
}

}  // namespace iumix
