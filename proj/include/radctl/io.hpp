#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "radctl/anatomy_graph.hpp"
#include "radctl/corpus.hpp"
#include "radctl/fusion.hpp"
#include "radctl/longitudinal.hpp"
#include "radctl/metrics/evaluation.hpp"
#include "radctl/tokens.hpp"

namespace radctl {

using Json = nlohmann::ordered_json;

/// Calls `fn(record, line_number)` for every non-blank line. Throws IoError,
/// ParseError (with file and line).
void read_jsonl(const std::filesystem::path& path, const std::function<void(const Json&, std::size_t)>& fn);

/// Writes one compact JSON object per line.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void write(const Json& record);
  std::size_t count() const noexcept { return count_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t count_ = 0;
};

void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);

// Corpus: {"report_id", "findings", "indication",
//          "sentences": [{"index", "text", "regions": [names]}]}
Json report_to_json(const AnnotatedReport& report, const RegionVocabulary& vocab);
AnnotatedReport report_from_json(const Json& j, const RegionVocabulary& vocab);
std::vector<AnnotatedReport> load_corpus(const std::filesystem::path& path, const RegionVocabulary& vocab);

// Raw reports: {"report_id", "text"}
struct RawReport {
  std::string report_id;
  std::string text;
};
std::vector<RawReport> load_raw_reports(const std::filesystem::path& path);

// Annotations: {"report_id", "sentence_index", "text", "regions": [names]}
Json annotation_to_json(const AnnotationRecord& record);
AnnotationRecord annotation_from_json(const Json& j);
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

// Tokens: {"study_id", "scan_id", "dim", "tokens": {region: [values]}}.
// Regions absent from "tokens" are undetected.
Json tokens_to_json(const ScanKey& key, const AnatomicalTokenSet& tokens, const RegionVocabulary& vocab);
std::pair<ScanKey, AnatomicalTokenSet> tokens_from_json(const Json& j, const RegionVocabulary& vocab);
TokenStore load_token_store(const std::filesystem::path& path, const RegionVocabulary& vocab);

/// Study metadata CSV with header
/// patient_id,study_id,scan_id,view,timestamp,report_id (column order free).
/// Rows of one study must agree on patient, timestamp and report.
/// Scans are linked to `store` when given.
std::vector<StudyRecord> load_study_metadata(const std::filesystem::path& path, const TokenStore* store = nullptr);
void write_study_metadata(const std::filesystem::path& path, const std::vector<StudyRecord>& studies);

Json pair_to_json(const LongitudinalPair& pair);
LongitudinalPair pair_from_json(const Json& j);

Json partition_to_json(const ValidPartition& partition, const RegionVocabulary& vocab);
ValidPartition partition_from_json(const Json& j, const RegionVocabulary& vocab);
Json sample_to_json(const DropoutSample& sample, const RegionVocabulary& vocab);
Json partial_instance_to_json(const PartialEvalInstance& instance, const RegionVocabulary& vocab);

Json joint_to_json(const JointRepresentation& joint, const RegionVocabulary& vocab);

/// Shape-annotated, row-major: {"shape": [rows, cols], "data": [...]}.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json params_to_json(const ProjectionParams& params);
ProjectionParams params_from_json(const Json& j);
void save_params(const std::filesystem::path& path, const ProjectionParams& params);
ProjectionParams load_params(const std::filesystem::path& path);

Json labels_to_json(const FindingLabelSet& labels);
FindingLabelSet labels_from_json(const Json& j);

Json eval_report_to_json(const EvalReport& report);

}  // namespace radctl
