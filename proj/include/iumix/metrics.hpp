#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace iumix {

enum class BleuTokenizer { tok_13a, none };
enum class BleuSmoothing { none, floor };

struct BleuReport {
  double score = 0.0;                                // percentage in [0, 100]
  std::array<double, 4> precisions = {0, 0, 0, 0};   // fractions
  double brevity_penalty = 1.0;
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;
  std::string signature;
};

// mteval-13a normalization: entity unescapes, punctuation split (period,
// comma and dash are context-sensitive around digits), whitespace collapse.
std::vector<std::string> tokenize_13a(std::string_view text);

// Corpus-level clipped n-gram precision, n = 1..4, geometric mean, brevity
// penalty min(1, exp(1 - ref_len/hyp_len)). Default smoothing "none": score
// is 0 when any precision is 0; "floor" lifts zero numerators to 0.01.
// Throws std::invalid_argument on length mismatch or an all-empty
// hypothesis corpus.
BleuReport corpus_bleu(const std::vector<std::string>& hyps,
                       const std::vector<std::string>& refs,
                       BleuTokenizer tokenizer = BleuTokenizer::tok_13a,
                       BleuSmoothing smoothing = BleuSmoothing::none);

}  // namespace iumix
