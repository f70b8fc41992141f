#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radctl/vocabulary.hpp"

namespace radctl {

/// One report sentence and the regions it describes (possibly none).
struct SentenceAnatomyPair {
  std::size_t sentence_index = 0;
  std::string text;
  RegionSet regions;

  bool localized() const noexcept { return !regions.empty(); }

  friend bool operator==(const SentenceAnatomyPair&, const SentenceAnatomyPair&) = default;
};

/// A report with its sentence-anatomy pairs ordered by sentence_index.
struct AnnotatedReport {
  std::string report_id;
  std::string findings_text;
  std::string indication_text;
  std::vector<SentenceAnatomyPair> pairs;

  /// Union of all pair regions.
  RegionSet regions() const;
  std::size_t unlocalized_count() const;

  friend bool operator==(const AnnotatedReport&, const AnnotatedReport&) = default;
};

// ---------------------------------------------------------------------------
// Section extraction

enum class SectionRole { Findings, Indication, Other };

struct SectionHeader {
  std::string name;  // matched case-insensitively, must be followed by ':'
  SectionRole role = SectionRole::Other;
};

/// Header rules for section extraction. A section runs from the colon after
/// its header to the next recognised header (of any role) or end of text.
/// When several indication-role headers are present, the one listed first in
/// `headers` wins.
struct HeaderConfig {
  std::vector<SectionHeader> headers;

  /// FINDINGS; INDICATION and HISTORY as indication; IMPRESSION, COMPARISON,
  /// TECHNIQUE, EXAMINATION, CONCLUSION and RECOMMENDATION(S) as terminators.
  static HeaderConfig defaults();
};

struct ReportSections {
  std::string findings;
  std::string indication;

  friend bool operator==(const ReportSections&, const ReportSections&) = default;
};

/// Throws MissingFindings when no Findings section exists or it is empty.
/// Section bodies are whitespace-normalised; casing is preserved.
ReportSections parse_report_sections(std::string_view raw_report,
                                     const HeaderConfig& config = HeaderConfig::defaults());

// ---------------------------------------------------------------------------
// Sentences

/// Splits on '.', '?' and '!' followed by whitespace or end of text, unless
/// the terminating word is a guarded abbreviation (dr., vs., approx., e.g. ...)
/// or the next word starts lowercase.
std::vector<std::string> split_sentences(std::string_view findings_text);

/// Collapses whitespace runs into a single space and trims both ends.
std::string normalize_whitespace(std::string_view text);

// ---------------------------------------------------------------------------
// Annotations

/// One sentence-level annotation as found in scene-graph style inputs.
struct AnnotationRecord {
  std::string report_id;
  std::size_t sentence_index = 0;
  std::string text;
  std::vector<std::string> regions;
};

/// Builds the AnnotatedReport for `report_id` from its records.
/// findings_text is the in-order join of sentence texts.
/// Throws UnknownRegion, DuplicateSentenceIndex, ReportMismatch (record for
/// a different report).
AnnotatedReport parse_annotations(std::string_view report_id, std::span<const AnnotationRecord> records,
                                  const RegionVocabulary& vocab = default_region_vocabulary());

/// Attaches extracted sections. Throws ReportMismatch when the annotated
/// sentences do not reconstruct the Findings text up to whitespace.
void attach_sections(AnnotatedReport& report, const ReportSections& sections);

}  // namespace radctl
