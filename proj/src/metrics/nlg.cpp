#include "radctl/metrics/nlg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "radctl/error.hpp"
#include "radctl/metrics/text.hpp"

namespace radctl {

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::uint64_t>;

NgramCounts count_ngrams(TokenSpan tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return counts;
}

// One alignment stage over tokens already mapped to comparable keys.
void align_stage(const std::vector<std::string>& hyp, const std::vector<std::string>& ref,
                 std::vector<std::optional<std::size_t>>& hyp_to_ref, std::vector<bool>& ref_used,
                 std::size_t& stage_count) {
  std::optional<std::size_t> last_ref;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (hyp_to_ref[i]) {
      last_ref = hyp_to_ref[i];
      continue;
    }
    std::optional<std::size_t> pick;
    if (last_ref && *last_ref + 1 < ref.size() && !ref_used[*last_ref + 1] && ref[*last_ref + 1] == hyp[i])
      pick = *last_ref + 1;
    for (std::size_t j = 0; !pick && j < ref.size(); ++j)
      if (!ref_used[j] && ref[j] == hyp[i]) pick = j;
    if (pick) {
      hyp_to_ref[i] = pick;
      ref_used[*pick] = true;
      ++stage_count;
    }
    last_ref = pick;
  }
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int n = 0; n < kMaxBleuOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hypothesis_length += other.hypothesis_length;
  reference_length += other.reference_length;
  return *this;
}

BleuStats bleu_stats(TokenSpan hypothesis, TokenSpan reference) {
  BleuStats stats;
  stats.hypothesis_length = hypothesis.size();
  stats.reference_length = reference.size();
  for (int n = 1; n <= kMaxBleuOrder; ++n) {
    const auto hyp = count_ngrams(hypothesis, static_cast<std::size_t>(n));
    const auto ref = count_ngrams(reference, static_cast<std::size_t>(n));
    for (const auto& [gram, count] : hyp) {
      stats.totals[n - 1] += count;
      auto it = ref.find(gram);
      if (it != ref.end()) stats.matches[n - 1] += std::min(count, it->second);
    }
  }
  return stats;
}

double bleu_score(const BleuStats& stats, int max_n) {
  if (max_n < 1 || max_n > kMaxBleuOrder)
    fail(ErrorCode::InvalidParams, "BLEU order " + std::to_string(max_n) + " outside 1..4");
  if (stats.hypothesis_length == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < max_n; ++n) {
    if (stats.totals[n] == 0 || stats.matches[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(stats.matches[n]) / static_cast<double>(stats.totals[n]));
  }
  const double c = static_cast<double>(stats.hypothesis_length);
  const double r = static_cast<double>(stats.reference_length);
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum / max_n);
}

double bleu(TokenSpan hypothesis, TokenSpan reference, int max_n) {
  return bleu_score(bleu_stats(hypothesis, reference), max_n);
}

double corpus_bleu(std::span<const std::vector<std::string>> hypotheses,
                   std::span<const std::vector<std::string>> references, int max_n) {
  if (hypotheses.size() != references.size())
    fail(ErrorCode::LengthMismatch, std::to_string(hypotheses.size()) + " hypotheses for " +
                                        std::to_string(references.size()) + " references");
  BleuStats total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) total += bleu_stats(hypotheses[i], references[i]);
  return bleu_score(total, max_n);
}

std::size_t lcs_length(TokenSpan a, TokenSpan b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(TokenSpan hypothesis, TokenSpan reference, double beta) {
  if (hypothesis.empty() || reference.empty()) return 0.0;
  const double lcs = static_cast<double>(lcs_length(hypothesis, reference));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(hypothesis.size());
  const double r = lcs / static_cast<double>(reference.size());
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (r + b2 * p);
}

MeteorAlignment meteor_align(TokenSpan hypothesis, TokenSpan reference) {
  MeteorAlignment out;
  std::vector<std::optional<std::size_t>> hyp_to_ref(hypothesis.size());
  std::vector<bool> ref_used(reference.size(), false);

  const std::vector<std::string> hyp_exact(hypothesis.begin(), hypothesis.end());
  const std::vector<std::string> ref_exact(reference.begin(), reference.end());
  align_stage(hyp_exact, ref_exact, hyp_to_ref, ref_used, out.exact_matches);

  std::vector<std::string> hyp_stem, ref_stem;
  for (const auto& t : hypothesis) hyp_stem.push_back(stem(t));
  for (const auto& t : reference) ref_stem.push_back(stem(t));
  align_stage(hyp_stem, ref_stem, hyp_to_ref, ref_used, out.stem_matches);

  out.matches = out.exact_matches + out.stem_matches;
  std::optional<std::size_t> prev_hyp, prev_ref;
  for (std::size_t i = 0; i < hyp_to_ref.size(); ++i) {
    if (!hyp_to_ref[i]) continue;
    const bool continues = prev_hyp && *prev_hyp + 1 == i && *prev_ref + 1 == *hyp_to_ref[i];
    if (!continues) ++out.chunks;
    prev_hyp = i;
    prev_ref = hyp_to_ref[i];
  }
  return out;
}

double meteor_like(TokenSpan hypothesis, TokenSpan reference, const MeteorParams& params) {
  if (hypothesis.empty() || reference.empty()) return 0.0;
  const MeteorAlignment a = meteor_align(hypothesis, reference);
  if (a.matches == 0) return 0.0;
  const double m = static_cast<double>(a.matches);
  const double p = m / static_cast<double>(hypothesis.size());
  const double r = m / static_cast<double>(reference.size());
  const double fmean = p * r / (params.alpha * p + (1.0 - params.alpha) * r);
  const double frag = a.matches > 1 ? static_cast<double>(a.chunks - 1) / (m - 1.0) : 0.0;
  const double penalty = params.gamma * std::pow(frag, params.beta);
  return fmean * (1.0 - penalty);
}

}  // namespace radctl
