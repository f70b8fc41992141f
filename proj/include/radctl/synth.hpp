#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "radctl/io.hpp"
#include "radctl/longitudinal.hpp"
#include "radctl/metrics/clinical.hpp"
#include "radctl/vocabulary.hpp"

namespace radctl {

struct TemplateSentence {
  std::string text;
  std::vector<std::string> regions;  // subset of the group's regions
  std::map<std::string, LabelClass> labels;
  bool abnormal = false;
};

/// Sentences describing one region group. Every anchor names all group
/// regions and every satellite a strict subset, so any selection that
/// contains an anchor is one connected component with exactly the group's
/// regions.
struct TemplateGroup {
  std::string name;
  std::vector<std::string> regions;
  std::vector<TemplateSentence> anchors;
  std::vector<TemplateSentence> satellites;
  std::size_t min_sentences = 1;
  std::size_t max_sentences = 1;
};

struct SyntheticSpec {
  std::size_t patient_count = 50;
  std::size_t min_studies = 1;
  std::size_t max_studies = 4;
  std::size_t min_scans = 1;
  std::size_t max_scans = 3;
  double ap_rate = 0.45;
  double pa_rate = 0.35;
  double lateral_rate = 0.20;  // remainder is OTHER
  /// Probability that a follow-up study holds only lateral/other scans.
  double lateral_only_rate = 0.10;
  std::size_t token_dim = 64;
  double detection_rate = 0.92;
  std::size_t min_groups = 2;
  std::size_t max_groups = 6;
  double abnormal_rate = 0.35;
  double unlocalized_rate = 0.30;  // follow-up reports only
  double indication_rate = 0.85;
  std::vector<TemplateGroup> groups = default_template_groups();

  /// Throws InvalidSpec.
  void validate(const RegionVocabulary& vocab) const;

  static std::vector<TemplateGroup> default_template_groups();
};

struct SyntheticCorpus {
  std::vector<RawReport> reports;
  std::vector<AnnotationRecord> annotations;
  std::vector<StudyRecord> studies;  // scans linked to `tokens`
  TokenStore tokens;
  Json sidecar;  // ground truth: sections, partitions, mapping types, labels, longitudinal flags
};

SyntheticCorpus synth_corpus(const SyntheticSpec& spec, std::uint64_t seed,
                             const RegionVocabulary& vocab = default_region_vocabulary());

struct SyntheticFiles {
  std::filesystem::path reports;
  std::filesystem::path annotations;
  std::filesystem::path metadata;
  std::filesystem::path tokens;
  std::filesystem::path sidecar;
};

/// reports.jsonl, annotations.jsonl, metadata.csv, tokens.jsonl, sidecar.json
SyntheticFiles write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir,
                                      const RegionVocabulary& vocab = default_region_vocabulary());

}  // namespace radctl
