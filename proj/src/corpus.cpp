#include "radctl/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

#include "radctl/error.hpp"

namespace radctl {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
char upper(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

struct HeaderMatch {
  std::size_t start = 0;          // first char of the header
  std::size_t content_start = 0;  // first char after ':'
  std::size_t header_index = 0;
};

// Length of the match of `header` at `pos` including the trailing colon, or 0.
std::size_t match_header(std::string_view text, std::size_t pos, std::string_view header) {
  if (pos + header.size() > text.size()) return 0;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (upper(text[pos + i]) != upper(header[i])) return 0;
  std::size_t j = pos + header.size();
  while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
  if (j >= text.size() || text[j] != ':') return 0;
  return j + 1 - pos;
}

std::vector<HeaderMatch> find_headers(std::string_view text, const HeaderConfig& config) {
  std::vector<HeaderMatch> matches;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (pos > 0 && is_alnum(text[pos - 1])) {
      ++pos;
      continue;
    }
    std::optional<HeaderMatch> best;
    std::size_t best_len = 0;
    for (std::size_t h = 0; h < config.headers.size(); ++h) {
      const std::string& name = config.headers[h].name;
      const std::size_t len = match_header(text, pos, name);
      if (len > 0 && name.size() > best_len) {
        best = HeaderMatch{pos, pos + len, h};
        best_len = name.size();
      }
    }
    if (best) {
      matches.push_back(*best);
      pos = best->content_start;
    } else {
      ++pos;
    }
  }
  return matches;
}

bool is_abbreviation(std::string_view word) {
  static constexpr std::array<std::string_view, 11> guards = {
      "dr", "mr", "mrs", "ms", "st", "vs", "approx", "e.g", "i.e", "cf", "fig"};
  std::string w;
  for (char c : word) w.push_back(lower(c));
  while (!w.empty() && !is_alnum(w.front())) w.erase(w.begin());
  return std::find(guards.begin(), guards.end(), w) != guards.end();
}

}  // namespace

RegionSet AnnotatedReport::regions() const {
  RegionSet out;
  for (const auto& p : pairs) out.insert(p.regions.begin(), p.regions.end());
  return out;
}

std::size_t AnnotatedReport::unlocalized_count() const {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return !p.localized(); }));
}

HeaderConfig HeaderConfig::defaults() {
  return HeaderConfig{{
      {"FINDINGS", SectionRole::Findings},
      {"INDICATION", SectionRole::Indication},
      {"HISTORY", SectionRole::Indication},
      {"IMPRESSION", SectionRole::Other},
      {"COMPARISON", SectionRole::Other},
      {"TECHNIQUE", SectionRole::Other},
      {"EXAMINATION", SectionRole::Other},
      {"CONCLUSION", SectionRole::Other},
      {"RECOMMENDATION", SectionRole::Other},
      {"RECOMMENDATIONS", SectionRole::Other},
  }};
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

ReportSections parse_report_sections(std::string_view raw_report, const HeaderConfig& config) {
  if (raw_report.empty()) fail(ErrorCode::MissingFindings, "empty report");
  const auto matches = find_headers(raw_report, config);

  auto body = [&](std::size_t m) {
    const std::size_t end = m + 1 < matches.size() ? matches[m + 1].start : raw_report.size();
    return normalize_whitespace(raw_report.substr(matches[m].content_start, end - matches[m].content_start));
  };

  ReportSections out;
  bool findings_header_seen = false;
  for (std::size_t m = 0; m < matches.size() && out.findings.empty(); ++m) {
    if (config.headers[matches[m].header_index].role != SectionRole::Findings) continue;
    findings_header_seen = true;
    out.findings = body(m);
  }
  if (out.findings.empty())
    fail(ErrorCode::MissingFindings, findings_header_seen ? "Findings section is empty" : "no Findings header");

  for (std::size_t h = 0; h < config.headers.size() && out.indication.empty(); ++h) {
    if (config.headers[h].role != SectionRole::Indication) continue;
    for (std::size_t m = 0; m < matches.size(); ++m) {
      if (matches[m].header_index != h) continue;
      out.indication = body(m);
      if (!out.indication.empty()) break;
    }
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c != '.' && c != '?' && c != '!') {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < text.size() && (text[end] == '.' || text[end] == '?' || text[end] == '!' ||
                                 text[end] == '"' || text[end] == '\'' || text[end] == ')'))
      ++end;
    if (end < text.size() && !is_space(text[end])) {
      i = end;
      continue;
    }
    std::size_t next = end;
    while (next < text.size() && is_space(text[next])) ++next;

    bool guarded = false;
    if (c == '.' && next < text.size()) {
      std::size_t ws = i;
      while (ws > start && !is_space(text[ws - 1])) --ws;
      const std::string_view word = text.substr(ws, i - ws);
      std::string lw;
      for (char ch : word) lw.push_back(lower(ch));
      if (lw == "no") {
        guarded = std::isdigit(static_cast<unsigned char>(text[next])) != 0;
      } else {
        guarded = is_abbreviation(word);
      }
      if (std::islower(static_cast<unsigned char>(text[next]))) guarded = true;
    }
    if (!guarded) {
      auto sentence = normalize_whitespace(text.substr(start, end - start));
      if (!sentence.empty()) out.push_back(std::move(sentence));
      start = next;
    }
    i = end;
  }
  if (start < text.size()) {
    auto tail = normalize_whitespace(text.substr(start));
    if (!tail.empty()) out.push_back(std::move(tail));
  }
  return out;
}

AnnotatedReport parse_annotations(std::string_view report_id, std::span<const AnnotationRecord> records,
                                  const RegionVocabulary& vocab) {
  AnnotatedReport report;
  report.report_id = std::string(report_id);
  report.pairs.reserve(records.size());
  for (const auto& rec : records) {
    if (rec.report_id != report_id)
      fail(ErrorCode::ReportMismatch,
           "record for report '" + rec.report_id + "' passed for '" + std::string(report_id) + "'");
    SentenceAnatomyPair pair;
    pair.sentence_index = rec.sentence_index;
    pair.text = normalize_whitespace(rec.text);
    for (const auto& name : rec.regions) {
      auto idx = vocab.find(name);
      if (!idx) fail(ErrorCode::UnknownRegion, "'" + name + "' in report '" + rec.report_id + "'");
      pair.regions.insert(RegionId{static_cast<std::uint16_t>(*idx)});
    }
    report.pairs.push_back(std::move(pair));
  }
  std::stable_sort(report.pairs.begin(), report.pairs.end(),
                   [](const auto& a, const auto& b) { return a.sentence_index < b.sentence_index; });
  for (std::size_t i = 1; i < report.pairs.size(); ++i)
    if (report.pairs[i].sentence_index == report.pairs[i - 1].sentence_index)
      fail(ErrorCode::DuplicateSentenceIndex, "sentence " + std::to_string(report.pairs[i].sentence_index) +
                                                  " in report '" + report.report_id + "'");

  std::string joined;
  for (const auto& p : report.pairs) {
    if (!joined.empty()) joined.push_back(' ');
    joined += p.text;
  }
  report.findings_text = std::move(joined);
  return report;
}

void attach_sections(AnnotatedReport& report, const ReportSections& sections) {
  if (normalize_whitespace(sections.findings) != normalize_whitespace(report.findings_text))
    fail(ErrorCode::ReportMismatch,
         "annotated sentences do not reconstruct the Findings of report '" + report.report_id + "'");
  report.findings_text = sections.findings;
  report.indication_text = sections.indication;
}

}  // namespace radctl
