#include "radctl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include "radctl/anatomy_graph.hpp"
#include "radctl/error.hpp"
#include "radctl/fusion.hpp"
#include "radctl/generator.hpp"
#include "radctl/longitudinal.hpp"
#include "radctl/random.hpp"

#ifndef RADCTL_VERSION
#define RADCTL_VERSION "0.0.0"
#endif

namespace radctl {

namespace {

std::filesystem::path out(const PipelineConfig& cfg, const char* name) { return cfg.output_dir / name; }

template <class Fn>
Json staged(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + stage + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("stage ") + stage + ": " + e.what());
  }
}

template <class Fn>
auto per_record(const std::string& what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), what + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, what + ": " + e.what());
  }
}

std::map<std::string, LongitudinalPair> load_pairs(const std::filesystem::path& path) {
  std::map<std::string, LongitudinalPair> pairs;
  read_jsonl(path, [&](const Json& j, std::size_t) {
    auto p = pair_from_json(j);
    const auto id = p.report_id;
    if (!pairs.emplace(id, std::move(p)).second) fail(ErrorCode::ReportMismatch, "two pairs for report '" + id + "'");
  });
  return pairs;
}

ProjectionParams stage_params(const PipelineConfig& cfg) {
  return cfg.params.empty() ? ProjectionParams::random(cfg.token_dim, derive_seed(cfg.seed, {"params"}))
                            : load_params(cfg.params);
}

std::string record_key(const Json& j) {
  std::string key = j.at("report_id").get<std::string>();
  if (j.contains("subset_index")) key += "#" + std::to_string(j.at("subset_index").get<std::size_t>());
  return key;
}

std::string record_text(const Json& j) {
  for (const char* field : {"text", "target_text", "findings"})
    if (j.contains(field)) return j.at(field).get<std::string>();
  fail(ErrorCode::ParseError, "record '" + record_key(j) + "' has no text field");
}

std::map<std::string, FindingLabelSet> load_label_file(const std::filesystem::path& path) {
  std::map<std::string, FindingLabelSet> labels;
  read_jsonl(path, [&](const Json& j, std::size_t) { labels[record_key(j)] = labels_from_json(j.at("labels")); });
  return labels;
}

}  // namespace

Json stage_ingest(const PipelineConfig& cfg) {
  return staged("ingest", [&] {
    const auto vocab = cfg.region_vocab();
    auto raw = load_raw_reports(cfg.reports);
    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.report_id < b.report_id; });

    std::map<std::string, std::vector<AnnotationRecord>> by_report;
    if (!cfg.annotations.empty())
      for (auto& a : load_annotations(cfg.annotations)) by_report[a.report_id].push_back(std::move(a));

    std::set<std::string> seen;
    std::size_t annotated = 0, sentences = 0, unlocalized = 0;
    std::filesystem::create_directories(cfg.output_dir);
    JsonlWriter writer(out(cfg, files::kCorpus));
    for (const auto& r : raw) {
      if (!seen.insert(r.report_id).second) fail(ErrorCode::ReportMismatch, "duplicate report '" + r.report_id + "'");
      AnnotatedReport report = per_record("report '" + r.report_id + "'", [&] {
        const auto sections = parse_report_sections(r.text);
        AnnotatedReport rep;
        if (auto it = by_report.find(r.report_id); it != by_report.end()) {
          rep = parse_annotations(r.report_id, it->second, vocab);
          attach_sections(rep, sections);
          ++annotated;
        } else {
          rep.report_id = r.report_id;
          rep.findings_text = sections.findings;
          rep.indication_text = sections.indication;
          const auto split = split_sentences(sections.findings);
          for (std::size_t i = 0; i < split.size(); ++i) rep.pairs.push_back({i, split[i], {}});
        }
        return rep;
      });
      sentences += report.pairs.size();
      unlocalized += report.unlocalized_count();
      writer.write(report_to_json(report, vocab));
    }
    for (const auto& [id, records] : by_report)
      if (!seen.count(id)) fail(ErrorCode::ReportMismatch, "annotations for unknown report '" + id + "'");

    return Json{{"reports", writer.count()},
                {"annotated_reports", annotated},
                {"sentences", sentences},
                {"unlocalized_sentences", unlocalized}};
  });
}

Json stage_pair(const PipelineConfig& cfg) {
  return staged("pair", [&] {
    const auto vocab = cfg.region_vocab();
    const TokenStore store = load_token_store(cfg.tokens, vocab);
    for (const auto& [key, set] : store.entries())
      if (set->dim() != cfg.token_dim)
        fail(ErrorCode::ShapeMismatch, "tokens of scan '" + key.scan_id + "' have dim " + std::to_string(set->dim()) +
                                           ", config token_dim is " + std::to_string(cfg.token_dim));
    const auto studies = load_study_metadata(cfg.metadata, &store);
    auto result = build_all_pairs(studies, cfg.seed);
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const auto& a, const auto& b) { return a.report_id < b.report_id; });

    std::size_t with_prior = 0;
    std::filesystem::create_directories(cfg.output_dir);
    JsonlWriter writer(out(cfg, files::kPairs));
    for (const auto& p : result.pairs) {
      per_record("report '" + p.report_id + "'", [&] { align_token_sets(p, store); });
      with_prior += p.prior.has_value();
      writer.write(pair_to_json(p));
    }
    std::sort(result.excluded_study_ids.begin(), result.excluded_study_ids.end());
    return Json{{"studies", studies.size()},
                {"scans_with_tokens", store.size()},
                {"pairs", result.pairs.size()},
                {"pairs_with_prior", with_prior},
                {"initial_exams", result.pairs.size() - with_prior},
                {"excluded_studies", result.excluded_study_ids.size()},
                {"excluded_study_ids", result.excluded_study_ids}};
  });
}

Json stage_partition(const PipelineConfig& cfg) {
  return staged("partition", [&] {
    const auto vocab = cfg.region_vocab();
    const auto corpus = load_corpus(out(cfg, files::kCorpus), vocab);
    std::size_t k_total = 0, empty = 0, max_k = 0;
    JsonlWriter writer(out(cfg, files::kPartitions));
    for (const auto& report : corpus) {
      const auto partition = find_valid_subsets(report);
      const auto check = validate_partition(report, partition);
      if (!check) {
        std::string msg = "partition of report '" + report.report_id + "' is invalid";
        for (const auto& d : check.diagnostics) msg += "; " + d;
        fail(ErrorCode::InvariantViolation, msg);
      }
      k_total += partition.size();
      empty += partition.empty();
      max_k = std::max(max_k, partition.size());
      writer.write(partition_to_json(partition, vocab));
    }
    return Json{{"reports", corpus.size()}, {"k_total", k_total}, {"max_k", max_k}, {"empty_partitions", empty}};
  });
}

Json stage_sample(const PipelineConfig& cfg) {
  return staged("sample", [&] {
    const auto vocab = cfg.region_vocab();
    const auto corpus = load_corpus(out(cfg, files::kCorpus), vocab);
    std::map<std::string, ValidPartition> partitions;
    read_jsonl(out(cfg, files::kPartitions), [&](const Json& j, std::size_t) {
      auto p = partition_from_json(j, vocab);
      partitions[p.report_id] = std::move(p);
    });

    SamplerOptions options;
    options.region_count = vocab.size();
    options.full_report_probability = cfg.full_report_probability;

    std::size_t samples = 0, full = 0, skipped = 0;
    JsonlWriter writer(out(cfg, files::kSamples));
    for (const auto& report : corpus) {
      const auto it = partitions.find(report.report_id);
      if (it == partitions.end())
        fail(ErrorCode::ReportMismatch, "no partition for report '" + report.report_id + "'");
      if (it->second.empty()) {
        ++skipped;
        continue;
      }
      for (std::size_t i = 0; i < cfg.samples_per_report; ++i) {
        const auto sample = sample_dropout(it->second, dropout_seed(cfg.seed, report.report_id, i), options);
        const auto check = check_dropout_sample(report, sample);
        if (!check) {
          std::string msg = "sample " + std::to_string(i) + " of report '" + report.report_id + "' breaks dropout";
          for (const auto& d : check.diagnostics) msg += "; " + d;
          fail(ErrorCode::InvariantViolation, msg);
        }
        full += sample.full_report;
        ++samples;
        Json j = sample_to_json(sample, vocab);
        j["sample_index"] = i;
        writer.write(j);
      }
    }

    const auto instances = build_partial_eval_set(corpus);
    JsonlWriter partial(out(cfg, files::kPartialEval));
    for (const auto& inst : instances) partial.write(partial_instance_to_json(inst, vocab));

    return Json{{"samples", samples},
                {"full_report_samples", full},
                {"reports_without_subsets", skipped},
                {"partial_eval_instances", instances.size()}};
  });
}

Json stage_fuse(const PipelineConfig& cfg) {
  return staged("fuse", [&] {
    const auto vocab = cfg.region_vocab();
    const auto params = stage_params(cfg);
    params.validate();
    if (params.input_dim() != 2 * cfg.token_dim)
      fail(ErrorCode::ShapeMismatch, "params expect input " + std::to_string(params.input_dim()) +
                                         ", token_dim gives " + std::to_string(2 * cfg.token_dim));
    save_params(out(cfg, files::kParams), params);

    const TokenStore store = load_token_store(cfg.tokens, vocab);
    const auto pairs = load_pairs(out(cfg, files::kPairs));
    const RegionSet all = vocab.all();
    JsonlWriter writer(out(cfg, files::kJoint));
    for (const auto& [id, pair] : pairs) {
      const auto joint = per_record("report '" + id + "'", [&] {
        const auto aligned = align_token_sets(pair, store);
        return build_joint_representation(*aligned.current, *aligned.prior, all, params);
      });
      Json j = joint_to_json(joint, vocab);
      j["report_id"] = id;
      writer.write(j);
    }
    return Json{{"joint_representations", writer.count()},
                {"input_dim", params.input_dim()},
                {"output_dim", params.output_dim()},
                {"params_source", cfg.params.empty() ? "random" : "file"}};
  });
}

Json stage_generate(const PipelineConfig& cfg) {
  return staged("generate", [&] {
    const auto vocab = cfg.region_vocab();
    const auto params = load_params(out(cfg, files::kParams));
    const TokenStore store = load_token_store(cfg.tokens, vocab);
    const auto pairs = load_pairs(out(cfg, files::kPairs));
    const auto corpus = load_corpus(out(cfg, files::kCorpus), vocab);
    std::map<std::string, const AnnotatedReport*> by_id;
    for (const auto& r : corpus) by_id[r.report_id] = &r;

    const auto tables = EmbedTables::random(cfg.text_vocab_size, cfg.max_positions, cfg.embed_width,
                                            params.output_dim(), derive_seed(cfg.seed, {"embed"}));
    TemplateGenerator generator(vocab);
    AssemblyOptions assembly{cfg.drop_masked};

    auto run = [&](const LongitudinalPair& pair, const AnnotatedReport& report, const RegionSet& target,
                   const std::string& context) {
      const auto aligned = align_token_sets(pair, store);
      const auto joint = build_joint_representation(*aligned.current, *aligned.prior, target, params);
      const auto ids = hash_token_ids(report.indication_text, cfg.text_vocab_size);
      const auto seq = assemble_multimodal_input(joint, ids, tables, assembly);
      return generate_report(seq, generator, context);
    };

    std::size_t full = 0, partial = 0, skipped = 0;
    {
      JsonlWriter writer(out(cfg, files::kGeneratedFull));
      const RegionSet all = vocab.all();
      for (const auto& [id, pair] : pairs) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) fail(ErrorCode::ReportMismatch, "pair for unknown report '" + id + "'");
        const auto text = per_record("report '" + id + "'", [&] { return run(pair, *it->second, all, id); });
        writer.write({{"report_id", id}, {"text", text}});
        ++full;
      }
    }
    {
      JsonlWriter writer(out(cfg, files::kGeneratedPartial));
      read_jsonl(out(cfg, files::kPartialEval), [&](const Json& j, std::size_t) {
        const auto id = j.at("report_id").get<std::string>();
        const auto index = j.at("subset_index").get<std::size_t>();
        const auto pit = pairs.find(id);
        if (pit == pairs.end()) {
          ++skipped;  // no frontal scan for this study
          return;
        }
        const auto target = vocab.ids(j.at("target_regions").get<std::vector<std::string>>());
        const auto context = id + "#" + std::to_string(index);
        const auto text = per_record("instance " + context, [&] { return run(pit->second, *by_id.at(id), target, context); });
        writer.write({{"report_id", id}, {"subset_index", index}, {"text", text}});
        ++partial;
      });
    }
    return Json{{"generator", generator.name()},
                {"full_reports", full},
                {"partial_reports", partial},
                {"partial_without_images", skipped}};
  });
}

EvalReport evaluate_files(const std::filesystem::path& generated, const std::filesystem::path& references,
                          const EvalOptions& options, const std::optional<std::filesystem::path>& generated_labels,
                          const std::optional<std::filesystem::path>& reference_labels) {
  std::map<std::string, std::string> refs;
  read_jsonl(references, [&](const Json& j, std::size_t) { refs[record_key(j)] = record_text(j); });

  std::vector<std::string> keys, hyp, ref;
  read_jsonl(generated, [&](const Json& j, std::size_t) {
    const auto key = record_key(j);
    const auto it = refs.find(key);
    if (it == refs.end()) fail(ErrorCode::ReportMismatch, "no reference for generated record '" + key + "'");
    keys.push_back(key);
    hyp.push_back(record_text(j));
    ref.push_back(it->second);
  });

  auto pick_labels = [&](const std::optional<std::filesystem::path>& path) -> std::optional<std::vector<FindingLabelSet>> {
    if (!path) return std::nullopt;
    const auto all = load_label_file(*path);
    std::vector<FindingLabelSet> out;
    for (const auto& k : keys) {
      const auto it = all.find(k);
      if (it == all.end()) fail(ErrorCode::ReportMismatch, "no labels for record '" + k + "' in " + path->string());
      out.push_back(it->second);
    }
    return out;
  };
  const auto gl = pick_labels(generated_labels);
  const auto rl = pick_labels(reference_labels);

  RuleLabeler labeler;
  std::optional<std::span<const FindingLabelSet>> gs, rs;
  if (gl) gs = std::span<const FindingLabelSet>(*gl);
  if (rl) rs = std::span<const FindingLabelSet>(*rl);
  auto report = evaluate_reports(hyp, ref, labeler, options, gs, rs);
  if (gl.has_value() != rl.has_value()) report.labeler = labeler.name() + "+provided";
  return report;
}

Json stage_evaluate(const PipelineConfig& cfg) {
  return staged("evaluate", [&] {
    EvalOptions options;
    options.ce_average = cfg.ce_average;
    options.rouge_beta = cfg.rouge_beta;
    options.histogram_bin = cfg.histogram_bin;
    const auto full = evaluate_files(out(cfg, files::kGeneratedFull), out(cfg, files::kCorpus), options);
    const auto partial = evaluate_files(out(cfg, files::kGeneratedPartial), out(cfg, files::kPartialEval), options);
    const auto table = format_eval_table({{"full", &full}, {"partial", &partial}});
    Json metrics = {{"full", eval_report_to_json(full)}, {"partial", eval_report_to_json(partial)}};
    write_json(out(cfg, files::kEval), metrics);
    {
      std::ofstream t(out(cfg, files::kEvalTable));
      t << table;
      if (!t) fail(ErrorCode::IoError, "cannot write " + out(cfg, files::kEvalTable).string());
    }
    return Json{{"counts", {{"full_scored", full.count}, {"partial_scored", partial.count}}},
                {"metrics", std::move(metrics)},
                {"table", table}};
  });
}

Json run_pipeline(const PipelineConfig& cfg) {
  cfg.validate_inputs();
  std::filesystem::create_directories(cfg.output_dir);

  Json counts = Json::object();
  counts["ingest"] = stage_ingest(cfg);
  counts["pair"] = stage_pair(cfg);
  counts["partition"] = stage_partition(cfg);
  counts["sample"] = stage_sample(cfg);
  counts["fuse"] = stage_fuse(cfg);
  counts["generate"] = stage_generate(cfg);
  Json eval = stage_evaluate(cfg);
  counts["evaluate"] = eval["counts"];

  auto n = [&](const char* stage, const char* key) { return counts[stage][key].get<std::size_t>(); };
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::InvariantViolation, "manifest counts disagree: " + what);
  };
  const std::size_t reports = n("ingest", "reports");
  require(n("partition", "reports") == reports, "partition report count");
  require(n("partition", "k_total") == n("sample", "partial_eval_instances"), "subset total vs partial-eval instances");
  require(n("sample", "samples") <= cfg.samples_per_report * reports, "samples above samples_per_report x reports");
  require(n("sample", "samples") == cfg.samples_per_report * (reports - n("sample", "reports_without_subsets")),
          "sample count");
  require(n("pair", "pairs") == n("generate", "full_reports"), "pairs vs full generations");
  require(n("generate", "partial_reports") + n("generate", "partial_without_images") ==
              n("sample", "partial_eval_instances"),
          "partial generations");

  const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  Json manifest = {
      {"format", "radctl.manifest/1"},
      {"created_at", format_timestamp(Timestamp{now})},
      {"versions", {{"radctl", RADCTL_VERSION}, {"json", NLOHMANN_JSON_VERSION_MAJOR * 10000 +
                                                             NLOHMANN_JSON_VERSION_MINOR * 100 +
                                                             NLOHMANN_JSON_VERSION_PATCH},
                    {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)}}},
      {"seed", cfg.seed},
      {"seeds",
       {{"scan_selection", "derive_seed(seed, scan, patient_id, study_id)"},
        {"dropout", "derive_seed(seed, dropout, report_id, sample_index)"},
        {"params", cfg.params.empty() ? Json(derive_seed(cfg.seed, {"params"})) : Json("file")},
        {"embed", derive_seed(cfg.seed, {"embed"})}}},
      {"config", cfg.to_json()},
      {"counts",
       {{"reports", reports},
        {"pairs", n("pair", "pairs")},
        {"pairs_with_prior", n("pair", "pairs_with_prior")},
        {"k_total", n("partition", "k_total")},
        {"samples", n("sample", "samples")},
        {"partial_eval_instances", n("sample", "partial_eval_instances")}}},
      {"stages", counts},
      {"metrics", eval["metrics"]},
      {"table", eval["table"]},
      {"outputs",
       {files::kCorpus, files::kPairs, files::kPartitions, files::kSamples, files::kPartialEval, files::kParams,
        files::kJoint, files::kGeneratedFull, files::kGeneratedPartial, files::kEval, files::kEvalTable}}};
  write_json(out(cfg, files::kManifest), manifest);
  return manifest;
}

}  // namespace radctl
