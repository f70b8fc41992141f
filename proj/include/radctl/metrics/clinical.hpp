#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radctl/vocabulary.hpp"

namespace radctl {

enum class LabelClass { Positive, Negative, Uncertain, NoMention };

std::string_view to_string(LabelClass c) noexcept;
/// Accepts positive, negative, uncertain, no_mention / "no mention". Throws ParseError.
LabelClass parse_label_class(std::string_view text);

/// Per-finding labels; keys are the labeler vocabulary.
struct FindingLabelSet {
  std::map<std::string, LabelClass> labels;

  static FindingLabelSet filled(const FindingVocabulary& vocab, LabelClass value);
  friend bool operator==(const FindingLabelSet&, const FindingLabelSet&) = default;
};

/// positive and uncertain count as positive; negative and no_mention as negative.
constexpr bool collapse(LabelClass c) noexcept { return c == LabelClass::Positive || c == LabelClass::Uncertain; }
std::map<std::string, bool> collapse_classes(const FindingLabelSet& labels);

struct CeTally {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  CeTally& operator+=(const CeTally& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
};

enum class CeAverage { Micro, Macro };

struct CeResult {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  CeAverage average = CeAverage::Micro;
  CeTally micro;
  std::map<std::string, CeTally> per_finding;
  /// Set when a denominator was empty and the value was reported as 0.
  bool precision_zero_division = false;
  bool recall_zero_division = false;
};

/// Collapses both sides and tallies every (report, finding) cell.
/// Micro averages the pooled tally; macro averages per-finding scores.
/// Throws LengthMismatch, VocabularyMismatch.
CeResult ce_metrics(std::span<const FindingLabelSet> ground_truth, std::span<const FindingLabelSet> predicted,
                    CeAverage average = CeAverage::Micro);

/// Seam for a clinical finding labeler.
class FindingLabeler {
 public:
  virtual ~FindingLabeler() = default;
  virtual std::string name() const = 0;
  virtual FindingLabelSet label(std::string_view report_text) = 0;
};

/// Keyword and negation rules over the 14 labeler findings; a test stand-in,
/// not a neural labeler.
///
/// Per sentence, a finding is mentioned when all parts of one of its
/// patterns occur in order ("effusion*" is a prefix, otherwise exact
/// token). A mention preceded in its sentence by a negation cue (no, not,
/// without, negative, free, absent, resolved) is negative; a sentence with
/// an uncertainty cue (may, possible, possibly, likely, probable, probably,
/// questionable, suggest*, concerning, cannot) makes it uncertain; otherwise
/// positive. A few findings also have explicit normal phrases ("heart size
/// is normal") that read as negative. Across sentences positive beats
/// uncertain beats negative beats no_mention. no_finding is positive when no
/// other finding except support_devices is positive or uncertain.
class RuleLabeler final : public FindingLabeler {
 public:
  RuleLabeler();

  std::string name() const override { return "rules"; }
  FindingLabelSet label(std::string_view report_text) override;

  struct Rule {
    std::string finding;
    std::vector<std::vector<std::string>> mentions;
    std::vector<std::vector<std::string>> normal_phrases;
  };
  const std::vector<Rule>& rules() const noexcept { return rules_; }

 private:
  std::vector<Rule> rules_;
};

/// Runs the labeler; failures surface as LabelerFailure.
FindingLabelSet label_findings(std::string_view report_text, FindingLabeler& labeler);

}  // namespace radctl
