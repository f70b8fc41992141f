#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radctl/metrics/clinical.hpp"
#include "radctl/metrics/nlg.hpp"

namespace radctl {

/// Report lengths in whitespace-separated words.
struct LengthDistribution {
  std::size_t bin_width = 10;
  std::vector<std::size_t> lengths;
  std::vector<std::size_t> histogram;  // histogram[i] counts lengths in [i*w, (i+1)*w)
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // population

  std::size_t count() const noexcept { return lengths.size(); }
};

std::size_t word_count(std::string_view text);

/// Throws InvalidParams on bin_width == 0.
LengthDistribution length_distribution(std::span<const std::string> reports, std::size_t bin_width = 10);

struct EvalOptions {
  CeAverage ce_average = CeAverage::Micro;
  MeteorParams meteor;
  double rouge_beta = 1.0;
  std::size_t histogram_bin = 10;
};

/// Scores of one generated corpus against its references. BLEU is corpus
/// level; METEOR and ROUGE-L are means of per-report scores.
struct EvalReport {
  std::size_t count = 0;
  std::array<double, 4> bleu{};  // BLEU-1..4
  double meteor = 0.0;
  double rouge_l = 0.0;
  CeResult ce;
  EvalOptions options;
  std::string labeler;  // labeler name, or "provided" when labels were supplied
  LengthDistribution generated_lengths;
  LengthDistribution reference_lengths;
};

/// When label sets are not given for a side, `labeler` produces them.
/// Throws LengthMismatch, VocabularyMismatch, LabelerFailure.
EvalReport evaluate_reports(std::span<const std::string> generated, std::span<const std::string> references,
                            FindingLabeler& labeler, const EvalOptions& options = {},
                            std::optional<std::span<const FindingLabelSet>> generated_labels = std::nullopt,
                            std::optional<std::span<const FindingLabelSet>> reference_labels = std::nullopt);

/// Fixed-width table: BL-1 BL-2 BL-3 BL-4 MTR RG-L | F1 P R.
std::string format_eval_table(const std::vector<std::pair<std::string, const EvalReport*>>& rows);

}  // namespace radctl
