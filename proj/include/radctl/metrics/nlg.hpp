#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace radctl {

using TokenSpan = std::span<const std::string>;

inline constexpr int kMaxBleuOrder = 4;

/// Clipped n-gram counts for one or more hypothesis/reference pairs.
/// Counts are additive, so corpus BLEU sums stats before scoring.
struct BleuStats {
  std::array<std::uint64_t, kMaxBleuOrder> matches{};
  std::array<std::uint64_t, kMaxBleuOrder> totals{};
  std::uint64_t hypothesis_length = 0;
  std::uint64_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats bleu_stats(TokenSpan hypothesis, TokenSpan reference);

/// Geometric mean of the clipped precisions up to max_n times the brevity
/// penalty exp(1 - r/c) when c <= r. No smoothing: any zero precision gives
/// 0, and so does an empty hypothesis. Throws InvalidParams unless
/// 1 <= max_n <= 4.
double bleu_score(const BleuStats& stats, int max_n);

/// Sentence-level BLEU against a single reference.
double bleu(TokenSpan hypothesis, TokenSpan reference, int max_n = 4);

/// Corpus BLEU: stats summed over all pairs, then scored once.
double corpus_bleu(std::span<const std::vector<std::string>> hypotheses,
                   std::span<const std::vector<std::string>> references, int max_n = 4);

std::size_t lcs_length(TokenSpan a, TokenSpan b);

/// LCS F-measure (1 + b^2) P R / (R + b^2 P); b = 1 weighs P and R equally.
double rouge_l(TokenSpan hypothesis, TokenSpan reference, double beta = 1.0);

/// Parameters of the METEOR-style score. Recorded with every evaluation.
struct MeteorParams {
  double alpha = 0.9;  // Fmean = P R / (alpha P + (1 - alpha) R)
  double beta = 3.0;   // fragmentation exponent
  double gamma = 0.5;  // maximum penalty
};

struct MeteorAlignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  std::size_t exact_matches = 0;
  std::size_t stem_matches = 0;
};

/// Unigram alignment: exact matches first, then stem matches among the
/// remaining tokens. Each stage walks the hypothesis left to right and takes
/// the reference token that continues the previous match when possible,
/// otherwise the earliest unused one.
MeteorAlignment meteor_align(TokenSpan hypothesis, TokenSpan reference);

/// Fmean * (1 - gamma * frag^beta) with frag = (chunks - 1) / (matches - 1)
/// (0 for a single match). One contiguous chunk costs nothing, so identical
/// inputs score 1. No synonym stage. 0 when nothing aligns.
double meteor_like(TokenSpan hypothesis, TokenSpan reference, const MeteorParams& params = {});

}  // namespace radctl
