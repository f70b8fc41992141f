#include "radctl/metrics/clinical.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <sstream>

#include "radctl/corpus.hpp"
#include "radctl/error.hpp"
#include "radctl/metrics/text.hpp"

namespace radctl {

namespace {

int rank(LabelClass c) {
  switch (c) {
    case LabelClass::Positive: return 3;
    case LabelClass::Uncertain: return 2;
    case LabelClass::Negative: return 1;
    case LabelClass::NoMention: return 0;
  }
  return 0;
}

std::vector<std::string> words(std::string_view pattern) {
  std::vector<std::string> out;
  std::istringstream in{std::string(pattern)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool part_matches(const std::string& part, const std::string& token) {
  if (!part.empty() && part.back() == '*') return token.compare(0, part.size() - 1, part, 0, part.size() - 1) == 0;
  return token == part;
}

// Position of the first token of the earliest in-order match, if any.
std::optional<std::size_t> find_pattern(const std::vector<std::string>& tokens,
                                        const std::vector<std::string>& parts) {
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    if (!part_matches(parts.front(), tokens[start])) continue;
    std::size_t p = 1;
    for (std::size_t i = start + 1; i < tokens.size() && p < parts.size(); ++i)
      if (part_matches(parts[p], tokens[i])) ++p;
    if (p == parts.size()) return start;
  }
  return std::nullopt;
}

bool any_of_tokens(const std::vector<std::string>& tokens, std::size_t end, std::span<const std::string_view> cues) {
  for (std::size_t i = 0; i < end && i < tokens.size(); ++i)
    for (auto cue : cues)
      if (part_matches(std::string(cue), tokens[i])) return true;
  return false;
}

constexpr std::array<std::string_view, 7> kNegationCues = {"no", "not", "without", "negative",
                                                          "free", "absent", "resolved"};
constexpr std::array<std::string_view, 10> kUncertaintyCues = {
    "may", "possible", "possibly", "likely", "probable", "probably", "questionable", "suggest*", "concerning",
    "cannot"};

}  // namespace

std::string_view to_string(LabelClass c) noexcept {
  switch (c) {
    case LabelClass::Positive: return "positive";
    case LabelClass::Negative: return "negative";
    case LabelClass::Uncertain: return "uncertain";
    case LabelClass::NoMention: return "no_mention";
  }
  return "no_mention";
}

LabelClass parse_label_class(std::string_view text) {
  if (text == "positive") return LabelClass::Positive;
  if (text == "negative") return LabelClass::Negative;
  if (text == "uncertain") return LabelClass::Uncertain;
  if (text == "no_mention" || text == "no mention") return LabelClass::NoMention;
  fail(ErrorCode::ParseError, "unknown label class '" + std::string(text) + "'");
}

FindingLabelSet FindingLabelSet::filled(const FindingVocabulary& vocab, LabelClass value) {
  FindingLabelSet out;
  for (const auto& name : vocab.names()) out.labels.emplace(name, value);
  return out;
}

std::map<std::string, bool> collapse_classes(const FindingLabelSet& labels) {
  std::map<std::string, bool> out;
  for (const auto& [finding, cls] : labels.labels) out.emplace(finding, collapse(cls));
  return out;
}

CeResult ce_metrics(std::span<const FindingLabelSet> ground_truth, std::span<const FindingLabelSet> predicted,
                    CeAverage average) {
  if (ground_truth.size() != predicted.size())
    fail(ErrorCode::LengthMismatch, std::to_string(ground_truth.size()) + " ground-truth label sets for " +
                                        std::to_string(predicted.size()) + " predictions");
  CeResult result;
  result.average = average;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    const auto& gt = ground_truth[i].labels;
    const auto& pred = predicted[i].labels;
    const bool same_keys = gt.size() == pred.size() &&
                           std::equal(gt.begin(), gt.end(), pred.begin(),
                                      [](const auto& a, const auto& b) { return a.first == b.first; });
    if (!same_keys) fail(ErrorCode::VocabularyMismatch, "label sets of report " + std::to_string(i) + " differ in findings");
    if (i > 0) {
      const auto& first = ground_truth[0].labels;
      const bool same_as_first = first.size() == gt.size() &&
                                 std::equal(first.begin(), first.end(), gt.begin(),
                                            [](const auto& a, const auto& b) { return a.first == b.first; });
      if (!same_as_first)
        fail(ErrorCode::VocabularyMismatch, "report " + std::to_string(i) + " uses a different finding vocabulary");
    }
    auto p = pred.begin();
    for (auto g = gt.begin(); g != gt.end(); ++g, ++p) {
      const bool truth = collapse(g->second);
      const bool guess = collapse(p->second);
      CeTally& t = result.per_finding[g->first];
      if (truth && guess) ++t.tp;
      else if (!truth && guess) ++t.fp;
      else if (truth && !guess) ++t.fn;
      else ++t.tn;
    }
  }
  for (const auto& [finding, t] : result.per_finding) result.micro += t;

  auto prf = [&](const CeTally& t, double& p, double& r, double& f) {
    const std::uint64_t pred_pos = t.tp + t.fp;
    const std::uint64_t true_pos = t.tp + t.fn;
    if (pred_pos == 0) result.precision_zero_division = true;
    if (true_pos == 0) result.recall_zero_division = true;
    p = pred_pos ? static_cast<double>(t.tp) / static_cast<double>(pred_pos) : 0.0;
    r = true_pos ? static_cast<double>(t.tp) / static_cast<double>(true_pos) : 0.0;
    f = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  };

  if (average == CeAverage::Micro) {
    prf(result.micro, result.precision, result.recall, result.f1);
  } else if (!result.per_finding.empty()) {
    double sp = 0, sr = 0, sf = 0;
    for (const auto& [finding, t] : result.per_finding) {
      double p, r, f;
      prf(t, p, r, f);
      sp += p;
      sr += r;
      sf += f;
    }
    const auto n = static_cast<double>(result.per_finding.size());
    result.precision = sp / n;
    result.recall = sr / n;
    result.f1 = sf / n;
  } else {
    result.precision_zero_division = result.recall_zero_division = true;
  }
  return result;
}

RuleLabeler::RuleLabeler() {
  const std::vector<std::tuple<std::string, std::vector<std::string_view>, std::vector<std::string_view>>> table = {
      {"enlarged_cardiomediastinum",
       {"mediastin* enlarg*", "mediastin* widen*", "widen* mediastin*", "enlarg* mediastin*", "cardiomediastinal enlarg*"},
       {"mediastin* normal", "mediastin* within normal", "mediastin* unremarkable", "mediastinal contours stable"}},
      {"cardiomegaly",
       {"cardiomegaly", "heart enlarg*", "enlarg* heart", "cardiac silhouette enlarg*", "enlarg* cardiac"},
       {"heart size normal", "heart size is normal", "cardiac silhouette normal", "normal heart size"}},
      {"lung_opacity", {"opacit*", "opacification", "infiltrat*", "haziness"}, {}},
      {"lung_lesion", {"nodul*", "mass", "masses", "lesion*"}, {}},
      {"edema", {"edema", "vascular congestion", "venous congestion", "fluid overload"}, {}},
      {"consolidation", {"consolidat*"}, {}},
      {"pneumonia", {"pneumonia", "infect*"}, {}},
      {"atelectasis", {"atelecta*", "collapse*"}, {}},
      {"pneumothorax", {"pneumothora*"}, {}},
      {"pleural_effusion", {"pleural effusion*", "effusion*", "blunting costophrenic"}, {"costophrenic angles sharp"}},
      {"pleural_other", {"pleural thicken*", "pleural scar*", "fibrothorax"}, {}},
      {"fracture", {"fractur*"}, {}},
      {"support_devices",
       {"tube", "tubes", "catheter*", "picc", "pacer", "pacemaker*", "wires", "port", "line", "lines", "drain*",
        "clips"},
       {}},
  };
  for (const auto& [finding, mentions, normals] : table) {
    Rule rule;
    rule.finding = finding;
    for (auto m : mentions) rule.mentions.push_back(words(m));
    for (auto n : normals) rule.normal_phrases.push_back(words(n));
    rules_.push_back(std::move(rule));
  }
}

FindingLabelSet RuleLabeler::label(std::string_view report_text) {
  FindingLabelSet out = FindingLabelSet::filled(default_labeler_vocabulary(), LabelClass::NoMention);
  auto raise = [&](const std::string& finding, LabelClass c) {
    LabelClass& current = out.labels.at(finding);
    if (rank(c) > rank(current)) current = c;
  };

  for (const auto& sentence : split_sentences(report_text)) {
    const auto tokens = tokenize(sentence).tokens;
    const bool uncertain = any_of_tokens(tokens, tokens.size(), kUncertaintyCues);
    for (const auto& rule : rules_) {
      std::optional<LabelClass> found;
      for (const auto& pattern : rule.mentions) {
        auto at = find_pattern(tokens, pattern);
        if (!at) continue;
        LabelClass c = any_of_tokens(tokens, *at, kNegationCues) ? LabelClass::Negative
                       : uncertain                               ? LabelClass::Uncertain
                                                                 : LabelClass::Positive;
        if (!found || rank(c) > rank(*found)) found = c;
      }
      if (!found)
        for (const auto& phrase : rule.normal_phrases)
          if (find_pattern(tokens, phrase)) found = LabelClass::Negative;
      if (found) raise(rule.finding, *found);
    }
  }

  bool abnormal = false;
  for (const auto& [finding, cls] : out.labels)
    if (finding != "no_finding" && finding != "support_devices" && collapse(cls)) abnormal = true;
  out.labels["no_finding"] = abnormal ? LabelClass::NoMention : LabelClass::Positive;
  return out;
}

FindingLabelSet label_findings(std::string_view report_text, FindingLabeler& labeler) {
  try {
    return labeler.label(report_text);
  } catch (const std::exception& e) {
    fail(ErrorCode::LabelerFailure, "labeler '" + labeler.name() + "': " + e.what());
  }
}

}  // namespace radctl
