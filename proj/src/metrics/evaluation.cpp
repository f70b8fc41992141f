#include "radctl/metrics/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "radctl/error.hpp"
#include "radctl/metrics/text.hpp"

namespace radctl {

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

LengthDistribution length_distribution(std::span<const std::string> reports, std::size_t bin_width) {
  if (bin_width == 0) fail(ErrorCode::InvalidParams, "histogram bin width must be positive");
  LengthDistribution out;
  out.bin_width = bin_width;
  if (reports.empty()) return out;
  out.lengths.reserve(reports.size());
  for (const auto& r : reports) out.lengths.push_back(word_count(r));

  const std::size_t longest = *std::max_element(out.lengths.begin(), out.lengths.end());
  out.histogram.assign(longest / bin_width + 1, 0);
  double sum = 0.0;
  for (std::size_t len : out.lengths) {
    ++out.histogram[len / bin_width];
    sum += static_cast<double>(len);
  }
  const double n = static_cast<double>(out.lengths.size());
  out.mean = sum / n;
  double sq = 0.0;
  for (std::size_t len : out.lengths) sq += (static_cast<double>(len) - out.mean) * (static_cast<double>(len) - out.mean);
  out.stddev = std::sqrt(sq / n);

  std::vector<std::size_t> sorted = out.lengths;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  out.median = sorted.size() % 2 ? static_cast<double>(sorted[mid])
                                 : (static_cast<double>(sorted[mid - 1]) + static_cast<double>(sorted[mid])) / 2.0;
  return out;
}

EvalReport evaluate_reports(std::span<const std::string> generated, std::span<const std::string> references,
                            FindingLabeler& labeler, const EvalOptions& options,
                            std::optional<std::span<const FindingLabelSet>> generated_labels,
                            std::optional<std::span<const FindingLabelSet>> reference_labels) {
  if (generated.size() != references.size())
    fail(ErrorCode::LengthMismatch, std::to_string(generated.size()) + " generated reports for " +
                                        std::to_string(references.size()) + " references");
  EvalReport report;
  report.count = generated.size();
  report.options = options;

  std::vector<std::vector<std::string>> hyp, ref;
  hyp.reserve(generated.size());
  ref.reserve(references.size());
  for (const auto& g : generated) hyp.push_back(tokenize(g).tokens);
  for (const auto& r : references) ref.push_back(tokenize(r).tokens);

  BleuStats stats;
  double meteor_sum = 0.0, rouge_sum = 0.0;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    stats += bleu_stats(hyp[i], ref[i]);
    meteor_sum += meteor_like(hyp[i], ref[i], options.meteor);
    rouge_sum += rouge_l(hyp[i], ref[i], options.rouge_beta);
  }
  for (int n = 1; n <= kMaxBleuOrder; ++n) report.bleu[n - 1] = bleu_score(stats, n);
  if (!hyp.empty()) {
    report.meteor = meteor_sum / static_cast<double>(hyp.size());
    report.rouge_l = rouge_sum / static_cast<double>(hyp.size());
  }

  auto labels_for = [&](std::span<const std::string> texts, std::optional<std::span<const FindingLabelSet>> given) {
    if (given) {
      if (given->size() != texts.size())
        fail(ErrorCode::LengthMismatch, std::to_string(given->size()) + " label sets for " +
                                            std::to_string(texts.size()) + " reports");
      return std::vector<FindingLabelSet>(given->begin(), given->end());
    }
    std::vector<FindingLabelSet> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(label_findings(t, labeler));
    return out;
  };
  const auto gen_labels = labels_for(generated, generated_labels);
  const auto ref_labels = labels_for(references, reference_labels);
  report.ce = ce_metrics(ref_labels, gen_labels, options.ce_average);
  report.labeler = generated_labels && reference_labels ? "provided" : labeler.name();

  report.generated_lengths = length_distribution(generated, options.histogram_bin);
  report.reference_lengths = length_distribution(references, options.histogram_bin);
  return report;
}

std::string format_eval_table(const std::vector<std::pair<std::string, const EvalReport*>>& rows) {
  std::size_t label_width = 6;
  for (const auto& [name, r] : rows) label_width = std::max(label_width, name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s | %6s %6s %6s %6s %6s %6s | %6s %6s %6s\n", static_cast<int>(label_width),
                "Set", "BL-1", "BL-2", "BL-3", "BL-4", "MTR", "RG-L", "F1", "P", "R");
  out += buf;
  out += std::string(label_width, '-') + "-+-" + std::string(41, '-') + "-+-" + std::string(20, '-') + "\n";
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof buf, "%-*s | %6.3f %6.3f %6.3f %6.3f %6.3f %6.3f | %6.3f %6.3f %6.3f\n",
                  static_cast<int>(label_width), name.c_str(), r->bleu[0], r->bleu[1], r->bleu[2], r->bleu[3],
                  r->meteor, r->rouge_l, r->ce.f1, r->ce.precision, r->ce.recall);
    out += buf;
  }
  return out;
}

}  // namespace radctl
