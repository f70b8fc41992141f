// radctl command-line driver.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 internal invariant violation.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "radctl/config.hpp"
#include "radctl/error.hpp"
#include "radctl/pipeline.hpp"
#include "radctl/synth.hpp"

namespace {

constexpr int kOk = 0, kUsage = 1, kData = 2, kInvariant = 3;

// Flag values collected before the config file is read; set flags override
// the file.
struct Overrides {
  std::string config;
  std::map<std::string, std::string> values;
  std::vector<std::string> raw;  // --set key=value
};

void add_config_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "Config file (key = value lines)")->check(CLI::ExistingFile);
  auto flag = [&](const char* name, const char* key, const char* help) {
    cmd->add_option_function<std::string>(name, [&o, key](const std::string& v) { o.values[key] = v; }, help);
  };
  flag("-o,--output", "output_dir", "Output directory (env RADCTL_OUTPUT_DIR overrides the config file)");
  flag("--reports", "reports", "Raw reports JSONL");
  flag("--annotations", "annotations", "Sentence-region annotations JSONL");
  flag("--metadata", "metadata", "Study metadata CSV");
  flag("--tokens", "tokens", "Anatomical tokens JSONL");
  flag("--params", "params", "Projection parameters JSON");
  flag("--region-vocabulary", "region_vocabulary", "Region vocabulary file");
  flag("--seed", "seed", "Global seed");
  flag("--token-dim", "token_dim", "Token dimension d");
  flag("--embed-width", "embed_width", "Embedding width");
  flag("--samples-per-report", "samples_per_report", "Dropout samples per report");
  flag("--full-report-probability", "full_report_probability", "Probability of drawing the whole report");
  flag("--ce-average", "ce_average", "micro or macro");
  cmd->add_flag_function("--drop-masked", [&o](std::int64_t) { o.values["drop_masked"] = "true"; },
                         "Leave masked regions out of the input sequence");
  cmd->add_option("--set", o.raw, "Any config key as key=value");
}

radctl::PipelineConfig resolve_config(const Overrides& o) {
  radctl::PipelineConfig cfg = o.config.empty() ? radctl::PipelineConfig{} : radctl::PipelineConfig::load(o.config);
  cfg.apply_environment();
  for (const auto& kv : o.raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) radctl::fail(radctl::ErrorCode::InvalidConfig, "--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [k, v] : o.values) cfg.set(k, v);
  cfg.validate();
  return cfg;
}

void print(const radctl::Json& j) { std::cout << j.dump(2) << "\n"; }

int exit_code(const radctl::Error& e) {
  switch (e.code()) {
    case radctl::ErrorCode::InvalidConfig:
      return kUsage;
    case radctl::ErrorCode::InvariantViolation:
      return kInvariant;
    default:
      return kData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radctl: controllable radiology report pipeline tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RADCTL_VERSION);

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus with a ground-truth sidecar");
  std::string synth_dir = "synth";
  std::uint64_t synth_seed = 0;
  radctl::SyntheticSpec spec;
  synth->add_option("-o,--output", synth_dir, "Output directory");
  synth->add_option("--seed", synth_seed, "Seed");
  synth->add_option("--patients", spec.patient_count, "Patient count")->check(CLI::PositiveNumber);
  synth->add_option("--max-studies", spec.max_studies, "Studies per patient, upper bound");
  synth->add_option("--token-dim", spec.token_dim, "Token dimension")->check(CLI::PositiveNumber);

  // stages
  Overrides overrides;
  std::map<std::string, CLI::App*> stages;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"ingest", "Parse reports and annotations into corpus.jsonl"},
           {"pair", "Build longitudinal pairs from metadata and tokens"},
           {"partition", "Find valid sentence-anatomy subsets"},
           {"sample", "Draw dropout samples and the partial-report evaluation set"},
           {"fuse", "Fuse current and prior tokens into joint representations"},
           {"generate", "Generate full and partial reports"},
           {"evaluate", "Score generated reports"},
           {"run", "Run every stage and write manifest.json"}}) {
    stages[name] = app.add_subcommand(name, help);
    add_config_flags(stages[name], overrides);
  }

  std::optional<std::string> gen_path, ref_path, gen_labels, ref_labels, eval_out;
  auto* evaluate = stages["evaluate"];
  evaluate->add_option("--generated", gen_path, "Generated reports JSONL")->check(CLI::ExistingFile);
  evaluate->add_option("--references", ref_path, "Reference reports JSONL")->check(CLI::ExistingFile);
  evaluate->add_option("--generated-labels", gen_labels, "Labels for generated reports")->check(CLI::ExistingFile);
  evaluate->add_option("--reference-labels", ref_labels, "Labels for references")->check(CLI::ExistingFile);
  evaluate->add_option("--json", eval_out, "Write the EvalReport JSON here (with --generated)");

  bool run_synth = false;
  stages["run"]->add_flag("--synth", run_synth,
                          "Generate the default synthetic corpus under <output>/synth and run on it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (synth->parsed()) {
      const auto corpus = radctl::synth_corpus(spec, synth_seed);
      const auto written = radctl::write_synthetic_corpus(corpus, synth_dir);
      print({{"output", synth_dir},
             {"reports", corpus.reports.size()},
             {"studies", corpus.studies.size()},
             {"totals", corpus.sidecar["totals"]}});
      return kOk;
    }

    if (evaluate->parsed() && (gen_path || ref_path)) {
      if (!gen_path || !ref_path) {
        std::cerr << "evaluate: --generated and --references go together\n";
        return kUsage;
      }
      radctl::PipelineConfig cfg = resolve_config(overrides);
      radctl::EvalOptions options;
      options.ce_average = cfg.ce_average;
      options.rouge_beta = cfg.rouge_beta;
      options.histogram_bin = cfg.histogram_bin;
      auto opt_path = [](const std::optional<std::string>& s) {
        return s ? std::optional<std::filesystem::path>(*s) : std::nullopt;
      };
      const auto report = radctl::evaluate_files(*gen_path, *ref_path, options, opt_path(gen_labels), opt_path(ref_labels));
      if (eval_out) radctl::write_json(*eval_out, radctl::eval_report_to_json(report));
      std::cout << radctl::format_eval_table({{"eval", &report}});
      return kOk;
    }

    radctl::PipelineConfig cfg = resolve_config(overrides);
    if (stages["run"]->parsed()) {
      if (run_synth) {
        const auto dir = cfg.output_dir / "synth";
        radctl::SyntheticSpec defaults;
        const auto corpus = radctl::synth_corpus(defaults, cfg.seed);
        const auto written = radctl::write_synthetic_corpus(corpus, dir);
        cfg.reports = written.reports;
        cfg.annotations = written.annotations;
        cfg.metadata = written.metadata;
        cfg.tokens = written.tokens;
        if (!overrides.values.count("token_dim")) cfg.token_dim = defaults.token_dim;
      }
      const auto manifest = radctl::run_pipeline(cfg);
      print({{"manifest", (cfg.output_dir / radctl::files::kManifest).generic_string()},
             {"counts", manifest["counts"]}});
      std::cout << manifest["table"].get<std::string>();
      return kOk;
    }

    if (stages["ingest"]->parsed() || stages["pair"]->parsed()) cfg.validate_inputs();
    radctl::Json result;
    if (stages["ingest"]->parsed()) result = radctl::stage_ingest(cfg);
    else if (stages["pair"]->parsed()) result = radctl::stage_pair(cfg);
    else if (stages["partition"]->parsed()) result = radctl::stage_partition(cfg);
    else if (stages["sample"]->parsed()) result = radctl::stage_sample(cfg);
    else if (stages["fuse"]->parsed()) result = radctl::stage_fuse(cfg);
    else if (stages["generate"]->parsed()) result = radctl::stage_generate(cfg);
    else if (evaluate->parsed()) {
      result = radctl::stage_evaluate(cfg);
      std::cout << result["table"].get<std::string>();
      result.erase("table");
      result.erase("metrics");
    }
    print(result);
    return kOk;
  } catch (const radctl::Error& e) {
    std::cerr << "radctl: " << radctl::to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "radctl: internal error: " << e.what() << "\n";
    return kInvariant;
  }
}
