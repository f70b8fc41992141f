#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radctl/corpus.hpp"

namespace radctl {

/// One valid sentence-anatomy subset: a connected component of the graph
/// whose nodes are localized sentences and whose edges join sentences with
/// overlapping region sets.
struct SubsetEntry {
  std::vector<std::size_t> pair_indices;  // sentence_index values, ascending
  std::vector<std::string> sentences;     // texts, parallel to pair_indices
  RegionSet regions;                      // union of the sentences' regions
  std::string target_text;                // sentences joined by single spaces

  friend bool operator==(const SubsetEntry&, const SubsetEntry&) = default;
};

struct UnlocalizedSentence {
  std::size_t sentence_index = 0;
  std::string text;

  friend bool operator==(const UnlocalizedSentence&, const UnlocalizedSentence&) = default;
};

/// The set of valid subsets of one report, ordered by their first sentence.
struct ValidPartition {
  std::string report_id;
  std::vector<SubsetEntry> subsets;
  std::vector<UnlocalizedSentence> unlocalized;

  std::size_t size() const noexcept { return subsets.size(); }
  bool empty() const noexcept { return subsets.empty(); }

  friend bool operator==(const ValidPartition&, const ValidPartition&) = default;
};

/// Components are found with a disjoint-set over region -> sentence
/// incidence: every sentence naming a region is united with the first
/// sentence that named it. Sentences without regions are listed separately.
ValidPartition find_valid_subsets(const AnnotatedReport& report);

struct CheckResult {
  bool valid = true;
  std::vector<std::string> diagnostics;

  explicit operator bool() const noexcept { return valid; }
  void violation(std::string message) {
    valid = false;
    diagnostics.push_back(std::move(message));
  }
};

/// Verifies the two dropout conditions for every subset:
///  C1: every report sentence whose regions intersect the subset's regions
///      belongs to the subset;
///  C2: the subset's regions are exactly the union of its sentences' regions.
/// Also reports structural problems (unknown or repeated sentences,
/// uncovered localized sentences, unlocalized sentences inside subsets).
CheckResult validate_partition(const AnnotatedReport& report, const ValidPartition& partition);

struct DropoutSample {
  std::string report_id;
  RegionSet target_regions;                     // A_target
  std::vector<bool> input_mask;                 // per vocabulary region: in A_target
  std::vector<std::size_t> selected_subsets;    // indices into the partition, ascending
  std::vector<std::size_t> target_sentences;    // sentence_index values, ascending
  std::string target_text;
  bool full_report = false;                     // every subset selected

  friend bool operator==(const DropoutSample&, const DropoutSample&) = default;
};

struct SamplerOptions {
  std::size_t region_count = kDefaultRegionCount;
  /// When set, the whole report is drawn with this probability before the
  /// two-stage draw. Unset means the pure two-stage scheme.
  std::optional<double> full_report_probability;
};

/// Draws m uniformly from {1..K}, then a uniform m-subset of the partition
/// without replacement. Target sentences keep report order; unlocalized
/// sentences are only included when all K subsets are drawn.
/// Throws EmptyPartition when K == 0.
DropoutSample sample_dropout(const ValidPartition& partition, std::uint64_t seed,
                             const SamplerOptions& options = {});

/// Seed for the n-th sample of a report under a global seed.
std::uint64_t dropout_seed(std::uint64_t global_seed, const std::string& report_id, std::size_t sample_index);

/// Mechanical check of both conditions on a sample against its report.
CheckResult check_dropout_sample(const AnnotatedReport& report, const DropoutSample& sample);

struct PartialEvalInstance {
  std::string report_id;
  std::size_t subset_index = 0;
  RegionSet target_regions;
  std::string target_text;

  friend bool operator==(const PartialEvalInstance&, const PartialEvalInstance&) = default;
};

/// One instance per valid subset per report, in input order.
std::vector<PartialEvalInstance> build_partial_eval_set(std::span<const AnnotatedReport> reports);

}  // namespace radctl
