#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "radctl/config.hpp"
#include "radctl/io.hpp"
#include "radctl/metrics/evaluation.hpp"

namespace radctl {

// Output file names inside PipelineConfig::output_dir.
namespace files {
inline constexpr const char* kCorpus = "corpus.jsonl";
inline constexpr const char* kPairs = "pairs.jsonl";
inline constexpr const char* kPartitions = "partitions.jsonl";
inline constexpr const char* kSamples = "samples.jsonl";
inline constexpr const char* kPartialEval = "partial_eval.jsonl";
inline constexpr const char* kParams = "params.json";
inline constexpr const char* kJoint = "joint.jsonl";
inline constexpr const char* kGeneratedFull = "generated_full.jsonl";
inline constexpr const char* kGeneratedPartial = "generated_partial.jsonl";
inline constexpr const char* kEval = "eval.json";
inline constexpr const char* kEvalTable = "eval_table.txt";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace files

// Each stage reads its inputs from the configured paths or from earlier
// stage outputs in output_dir, writes its own outputs, and returns counts.
// Failures are rethrown with the stage name prefixed; per-record failures
// also name the record.
Json stage_ingest(const PipelineConfig& cfg);
Json stage_pair(const PipelineConfig& cfg);
Json stage_partition(const PipelineConfig& cfg);
Json stage_sample(const PipelineConfig& cfg);
Json stage_fuse(const PipelineConfig& cfg);
Json stage_generate(const PipelineConfig& cfg);
/// Returns {"counts": ..., "metrics": {"full": EvalReport, "partial": EvalReport}, "table": text}.
Json stage_evaluate(const PipelineConfig& cfg);

/// Scores generated text against references. Both files hold one JSON object
/// per line keyed by report_id (plus subset_index when present); the text is
/// read from "text", "target_text" or "findings". Every generated key must
/// have a reference. Label files, when given, hold {"report_id", ["subset_index"],
/// "labels": {finding: class}} and replace the rule labeler for that side.
/// Throws ReportMismatch, LengthMismatch, ParseError.
EvalReport evaluate_files(const std::filesystem::path& generated, const std::filesystem::path& references,
                          const EvalOptions& options = {},
                          const std::optional<std::filesystem::path>& generated_labels = std::nullopt,
                          const std::optional<std::filesystem::path>& reference_labels = std::nullopt);

/// Runs every stage in order, checks cross-stage counts and writes
/// manifest.json. The manifest differs between identical runs only in
/// "created_at". Throws InvariantViolation when counts disagree.
Json run_pipeline(const PipelineConfig& cfg);

}  // namespace radctl
