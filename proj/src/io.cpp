#include "radctl/io.hpp"

#include <map>
#include <sstream>

#include "radctl/error.hpp"

namespace radctl {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

Json regions_json(const RegionSet& regions, const RegionVocabulary& vocab) {
  Json arr = Json::array();
  for (RegionId r : regions) arr.push_back(vocab.name(r));
  return arr;
}

RegionSet regions_from(const Json& arr, const RegionVocabulary& vocab) {
  RegionSet out;
  for (const auto& n : arr) out.insert(vocab.id(n.get<std::string>()));
  return out;
}

Json scan_key_json(const ScanKey& k) { return Json{{"study_id", k.study_id}, {"scan_id", k.scan_id}}; }
ScanKey scan_key_from(const Json& j) { return {j.at("study_id").get<std::string>(), j.at("scan_id").get<std::string>()}; }

}  // namespace

void read_jsonl(const std::filesystem::path& path, const std::function<void(const Json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(Json::parse(line), number);
    } catch (const Json::exception& e) {
      fail(ErrorCode::ParseError, where(path, number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), where(path, number) + ": " + e.what());
    }
  }
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : path_(path), out_(path) {
  if (!out_) fail(ErrorCode::IoError, "cannot write " + path.string());
}

void JsonlWriter::write(const Json& record) {
  out_ << record.dump() << '\n';
  if (!out_) fail(ErrorCode::IoError, "write failed on " + path_.string());
  ++count_;
}

void write_json(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << value.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

Json report_to_json(const AnnotatedReport& report, const RegionVocabulary& vocab) {
  Json sentences = Json::array();
  for (const auto& p : report.pairs)
    sentences.push_back({{"index", p.sentence_index}, {"text", p.text}, {"regions", regions_json(p.regions, vocab)}});
  return Json{{"report_id", report.report_id},
              {"findings", report.findings_text},
              {"indication", report.indication_text},
              {"sentences", std::move(sentences)}};
}

AnnotatedReport report_from_json(const Json& j, const RegionVocabulary& vocab) {
  std::vector<AnnotationRecord> records;
  const auto id = j.at("report_id").get<std::string>();
  for (const auto& s : j.at("sentences"))
    records.push_back({id, s.at("index").get<std::size_t>(), s.at("text").get<std::string>(),
                       s.at("regions").get<std::vector<std::string>>()});
  AnnotatedReport report = parse_annotations(id, records, vocab);
  report.findings_text = j.value("findings", report.findings_text);
  report.indication_text = j.value("indication", std::string{});
  return report;
}

std::vector<AnnotatedReport> load_corpus(const std::filesystem::path& path, const RegionVocabulary& vocab) {
  std::vector<AnnotatedReport> out;
  read_jsonl(path, [&](const Json& j, std::size_t) { out.push_back(report_from_json(j, vocab)); });
  return out;
}

std::vector<RawReport> load_raw_reports(const std::filesystem::path& path) {
  std::vector<RawReport> out;
  read_jsonl(path, [&](const Json& j, std::size_t) {
    out.push_back({j.at("report_id").get<std::string>(), j.at("text").get<std::string>()});
  });
  return out;
}

Json annotation_to_json(const AnnotationRecord& r) {
  return Json{{"report_id", r.report_id}, {"sentence_index", r.sentence_index}, {"text", r.text}, {"regions", r.regions}};
}

AnnotationRecord annotation_from_json(const Json& j) {
  return {j.at("report_id").get<std::string>(), j.at("sentence_index").get<std::size_t>(),
          j.at("text").get<std::string>(), j.at("regions").get<std::vector<std::string>>()};
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  std::vector<AnnotationRecord> out;
  read_jsonl(path, [&](const Json& j, std::size_t) { out.push_back(annotation_from_json(j)); });
  return out;
}

Json tokens_to_json(const ScanKey& key, const AnatomicalTokenSet& tokens, const RegionVocabulary& vocab) {
  Json detected = Json::object();
  for (std::size_t i = 0; i < tokens.region_count(); ++i) {
    const RegionId r{static_cast<std::uint16_t>(i)};
    if (!tokens.present(r)) continue;
    const auto v = tokens.vector(r);
    detected[vocab.name(r)] = std::vector<double>(v.begin(), v.end());
  }
  return Json{{"study_id", key.study_id}, {"scan_id", key.scan_id}, {"dim", tokens.dim()}, {"tokens", std::move(detected)}};
}

std::pair<ScanKey, AnatomicalTokenSet> tokens_from_json(const Json& j, const RegionVocabulary& vocab) {
  const auto dim = j.at("dim").get<std::size_t>();
  if (dim == 0) fail(ErrorCode::ShapeMismatch, "token dimension must be positive");
  AnatomicalTokenSet set(vocab.size(), dim);
  for (const auto& [name, values] : j.at("tokens").items()) {
    const auto v = values.get<std::vector<double>>();
    set.set(vocab.id(name), v);
  }
  return {scan_key_from(j), std::move(set)};
}

TokenStore load_token_store(const std::filesystem::path& path, const RegionVocabulary& vocab) {
  TokenStore store;
  read_jsonl(path, [&](const Json& j, std::size_t) {
    auto [key, set] = tokens_from_json(j, vocab);
    store.insert(std::move(key), std::move(set));
  });
  return store;
}

std::vector<StudyRecord> load_study_metadata(const std::filesystem::path& path, const TokenStore* store) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, path.string() + ": missing header");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"patient_id", "study_id", "scan_id", "view", "timestamp", "report_id"})
    if (!col.contains(required))
      fail(ErrorCode::ParseError, path.string() + ": missing column '" + required + "'");

  std::vector<StudyRecord> studies;
  std::map<std::string, std::size_t> index;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      fail(ErrorCode::ParseError, where(path, number) + ": expected " + std::to_string(header.size()) + " fields");
    const std::string& study_id = f[col["study_id"]];
    Timestamp ts;
    try {
      ts = parse_timestamp(f[col["timestamp"]]);
    } catch (const Error& e) {
      fail(ErrorCode::ParseError, where(path, number) + ": " + e.what());
    }
    auto [it, inserted] = index.emplace(study_id, studies.size());
    if (inserted) {
      studies.push_back({study_id, f[col["patient_id"]], ts, {}, f[col["report_id"]]});
    }
    StudyRecord& study = studies[it->second];
    if (study.patient_id != f[col["patient_id"]] || study.timestamp != ts || study.report_id != f[col["report_id"]])
      fail(ErrorCode::ParseError, where(path, number) + ": rows of study '" + study_id + "' disagree");
    ScanRecord scan{f[col["scan_id"]], parse_view(f[col["view"]]), nullptr};
    if (store) scan.tokens = store->find({study_id, scan.scan_id});
    study.scans.push_back(std::move(scan));
  }
  return studies;
}

void write_study_metadata(const std::filesystem::path& path, const std::vector<StudyRecord>& studies) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << "patient_id,study_id,scan_id,view,timestamp,report_id\n";
  for (const auto& s : studies)
    for (const auto& scan : s.scans)
      out << csv_field(s.patient_id) << ',' << csv_field(s.study_id) << ',' << csv_field(scan.scan_id) << ','
          << to_string(scan.view) << ',' << format_timestamp(s.timestamp) << ',' << csv_field(s.report_id) << '\n';
}

Json pair_to_json(const LongitudinalPair& pair) {
  return Json{{"patient_id", pair.patient_id},
              {"report_id", pair.report_id},
              {"current", scan_key_json(pair.current)},
              {"prior", pair.prior ? scan_key_json(*pair.prior) : Json(nullptr)},
              {"is_initial", pair.is_initial}};
}

LongitudinalPair pair_from_json(const Json& j) {
  LongitudinalPair p;
  p.patient_id = j.at("patient_id").get<std::string>();
  p.report_id = j.at("report_id").get<std::string>();
  p.current = scan_key_from(j.at("current"));
  if (!j.at("prior").is_null()) p.prior = scan_key_from(j.at("prior"));
  p.is_initial = j.at("is_initial").get<bool>();
  if (p.is_initial == p.prior.has_value())
    fail(ErrorCode::ParseError, "is_initial disagrees with prior for study '" + p.current.study_id + "'");
  return p;
}

Json partition_to_json(const ValidPartition& partition, const RegionVocabulary& vocab) {
  Json subsets = Json::array();
  for (const auto& s : partition.subsets)
    subsets.push_back({{"pair_indices", s.pair_indices},
                       {"sentences", s.sentences},
                       {"regions", regions_json(s.regions, vocab)},
                       {"target_text", s.target_text}});
  Json unlocalized = Json::array();
  for (const auto& u : partition.unlocalized) unlocalized.push_back({{"index", u.sentence_index}, {"text", u.text}});
  return Json{{"report_id", partition.report_id},
              {"k", partition.size()},
              {"subsets", std::move(subsets)},
              {"unlocalized", std::move(unlocalized)}};
}

ValidPartition partition_from_json(const Json& j, const RegionVocabulary& vocab) {
  ValidPartition p;
  p.report_id = j.at("report_id").get<std::string>();
  for (const auto& s : j.at("subsets")) {
    SubsetEntry e;
    e.pair_indices = s.at("pair_indices").get<std::vector<std::size_t>>();
    e.sentences = s.at("sentences").get<std::vector<std::string>>();
    e.regions = regions_from(s.at("regions"), vocab);
    e.target_text = s.at("target_text").get<std::string>();
    if (e.sentences.size() != e.pair_indices.size())
      fail(ErrorCode::ParseError, "subset sentences and indices differ in length");
    p.subsets.push_back(std::move(e));
  }
  for (const auto& u : j.at("unlocalized"))
    p.unlocalized.push_back({u.at("index").get<std::size_t>(), u.at("text").get<std::string>()});
  return p;
}

Json sample_to_json(const DropoutSample& sample, const RegionVocabulary& vocab) {
  std::vector<int> mask(sample.input_mask.begin(), sample.input_mask.end());
  return Json{{"report_id", sample.report_id},
              {"target_regions", regions_json(sample.target_regions, vocab)},
              {"input_mask", mask},
              {"selected_subsets", sample.selected_subsets},
              {"target_sentences", sample.target_sentences},
              {"target_text", sample.target_text},
              {"full_report", sample.full_report}};
}

Json partial_instance_to_json(const PartialEvalInstance& instance, const RegionVocabulary& vocab) {
  return Json{{"report_id", instance.report_id},
              {"subset_index", instance.subset_index},
              {"target_regions", regions_json(instance.target_regions, vocab)},
              {"target_text", instance.target_text}};
}

Json joint_to_json(const JointRepresentation& joint, const RegionVocabulary& vocab) {
  Json regions = Json::array();
  for (std::size_t i = 0; i < joint.region_count(); ++i) {
    const RegionId r{static_cast<std::uint16_t>(i)};
    const auto row = joint.row(r);
    regions.push_back({{"region", vocab.name(r)},
                       {"in_target", static_cast<bool>(joint.in_target[i])},
                       {"vector", std::vector<double>(row.begin(), row.end())}});
  }
  return Json{{"width", joint.width()}, {"regions", std::move(regions)}};
}

Json matrix_to_json(const Matrix& m) {
  return Json{{"shape", {m.rows(), m.cols()}}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from_json(const Json& j) {
  const auto shape = j.at("shape").get<std::vector<std::size_t>>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (shape.size() != 2 || shape[0] * shape[1] != data.size())
    fail(ErrorCode::ShapeMismatch, "matrix data does not match its shape header");
  Matrix m(static_cast<Eigen::Index>(shape[0]), static_cast<Eigen::Index>(shape[1]));
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

Json vector_to_json(const Vector& v) {
  return Json{{"shape", {v.size()}}, {"data", std::vector<double>(v.data(), v.data() + v.size())}};
}

Vector vector_from_json(const Json& j) {
  const auto shape = j.at("shape").get<std::vector<std::size_t>>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (shape.size() != 1 || shape[0] != data.size())
    fail(ErrorCode::ShapeMismatch, "vector data does not match its shape header");
  return Eigen::Map<const Vector>(data.data(), static_cast<Eigen::Index>(data.size()));
}

Json params_to_json(const ProjectionParams& p) {
  return Json{{"format", "radctl.projection/1"},
              {"epsilon", p.bn_epsilon},
              {"fc1", {{"weight", matrix_to_json(p.fc1_weight)}, {"bias", vector_to_json(p.fc1_bias)}}},
              {"bn",
               {{"gamma", vector_to_json(p.bn_gamma)},
                {"beta", vector_to_json(p.bn_beta)},
                {"running_mean", vector_to_json(p.bn_running_mean)},
                {"running_var", vector_to_json(p.bn_running_var)}}},
              {"fc2", {{"weight", matrix_to_json(p.fc2_weight)}, {"bias", vector_to_json(p.fc2_bias)}}}};
}

ProjectionParams params_from_json(const Json& j) {
  if (j.value("format", std::string{}) != "radctl.projection/1")
    fail(ErrorCode::ParseError, "not a projection parameter file");
  ProjectionParams p;
  try {
    p.bn_epsilon = j.at("epsilon").get<double>();
    p.fc1_weight = matrix_from_json(j.at("fc1").at("weight"));
    p.fc1_bias = vector_from_json(j.at("fc1").at("bias"));
    p.bn_gamma = vector_from_json(j.at("bn").at("gamma"));
    p.bn_beta = vector_from_json(j.at("bn").at("beta"));
    p.bn_running_mean = vector_from_json(j.at("bn").at("running_mean"));
    p.bn_running_var = vector_from_json(j.at("bn").at("running_var"));
    p.fc2_weight = matrix_from_json(j.at("fc2").at("weight"));
    p.fc2_bias = vector_from_json(j.at("fc2").at("bias"));
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("projection parameters: ") + e.what());
  }
  p.validate();
  return p;
}

void save_params(const std::filesystem::path& path, const ProjectionParams& params) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << params_to_json(params).dump() << '\n';
}

ProjectionParams load_params(const std::filesystem::path& path) { return params_from_json(read_json(path)); }

Json labels_to_json(const FindingLabelSet& labels) {
  Json j = Json::object();
  for (const auto& [finding, cls] : labels.labels) j[finding] = std::string(to_string(cls));
  return j;
}

FindingLabelSet labels_from_json(const Json& j) {
  FindingLabelSet out;
  for (const auto& [finding, cls] : j.items()) out.labels.emplace(finding, parse_label_class(cls.get<std::string>()));
  return out;
}

namespace {

Json lengths_json(const LengthDistribution& d) {
  return Json{{"count", d.count()},
              {"bin_width", d.bin_width},
              {"histogram", d.histogram},
              {"mean", d.mean},
              {"median", d.median},
              {"stddev", d.stddev}};
}

Json tally_json(const CeTally& t) { return Json{{"tp", t.tp}, {"fp", t.fp}, {"fn", t.fn}, {"tn", t.tn}}; }

}  // namespace

Json eval_report_to_json(const EvalReport& r) {
  Json per_finding = Json::object();
  for (const auto& [finding, t] : r.ce.per_finding) per_finding[finding] = tally_json(t);
  return Json{{"count", r.count},
              {"bleu_1", r.bleu[0]},
              {"bleu_2", r.bleu[1]},
              {"bleu_3", r.bleu[2]},
              {"bleu_4", r.bleu[3]},
              {"meteor", r.meteor},
              {"rouge_l", r.rouge_l},
              {"ce",
               {{"f1", r.ce.f1},
                {"precision", r.ce.precision},
                {"recall", r.ce.recall},
                {"average", r.ce.average == CeAverage::Micro ? "micro" : "macro"},
                {"precision_zero_division", r.ce.precision_zero_division},
                {"recall_zero_division", r.ce.recall_zero_division},
                {"micro", tally_json(r.ce.micro)},
                {"per_finding", std::move(per_finding)}}},
              {"labeler", r.labeler},
              {"meteor_params",
               {{"alpha", r.options.meteor.alpha}, {"beta", r.options.meteor.beta}, {"gamma", r.options.meteor.gamma}}},
              {"rouge_beta", r.options.rouge_beta},
              {"generated_lengths", lengths_json(r.generated_lengths)},
              {"reference_lengths", lengths_json(r.reference_lengths)}};
}

}  // namespace radctl
