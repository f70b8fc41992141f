// Python module _radctl. Structured values cross the boundary as JSON text;
// radctl/__init__.py turns them into dicts and lists.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "radctl/anatomy_graph.hpp"
#include "radctl/config.hpp"
#include "radctl/corpus.hpp"
#include "radctl/error.hpp"
#include "radctl/fusion.hpp"
#include "radctl/io.hpp"
#include "radctl/metrics/clinical.hpp"
#include "radctl/metrics/nlg.hpp"
#include "radctl/metrics/text.hpp"
#include "radctl/pipeline.hpp"
#include "radctl/synth.hpp"

namespace py = pybind11;
using namespace radctl;

namespace {

std::vector<std::string> toks(const std::string& s) { return tokenize(s).tokens; }

std::vector<FindingLabelSet> label_sets(const std::string& text) {
  std::vector<FindingLabelSet> out;
  for (const auto& j : Json::parse(text)) out.push_back(labels_from_json(j));
  return out;
}

}  // namespace

PYBIND11_MODULE(_radctl, m) {
  static py::exception<Error> error(m, "RadctlError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.attr("__version__") = RADCTL_VERSION;

  m.def("parse_report_sections", [](const std::string& raw) {
    const auto s = parse_report_sections(raw);
    return std::make_pair(s.findings, s.indication);
  });
  m.def("split_sentences", [](const std::string& text) { return split_sentences(text); });

  m.def("find_valid_subsets", [](const std::string& report) {
    const auto& vocab = default_region_vocabulary();
    return partition_to_json(find_valid_subsets(report_from_json(Json::parse(report), vocab)), vocab).dump();
  });
  m.def("validate_partition", [](const std::string& report, const std::string& partition) {
    const auto& vocab = default_region_vocabulary();
    const auto r = validate_partition(report_from_json(Json::parse(report), vocab),
                                      partition_from_json(Json::parse(partition), vocab));
    return std::make_pair(r.valid, r.diagnostics);
  });
  m.def(
      "sample_dropout",
      [](const std::string& partition, std::uint64_t seed, std::optional<double> full_report_probability) {
        const auto& vocab = default_region_vocabulary();
        SamplerOptions opt;
        opt.full_report_probability = full_report_probability;
        return sample_to_json(sample_dropout(partition_from_json(Json::parse(partition), vocab), seed, opt), vocab)
            .dump();
      },
      py::arg("partition"), py::arg("seed"), py::arg("full_report_probability") = py::none());
  m.def("dropout_seed", &dropout_seed);

  m.def("random_params", [](std::size_t token_dim, std::uint64_t seed) {
    return params_to_json(ProjectionParams::random(token_dim, seed)).dump();
  });
  m.def("mlp_forward", [](const std::string& params, const std::vector<double>& x) {
    const Vector y = mlp_forward(x, params_from_json(Json::parse(params)));
    return std::vector<double>(y.data(), y.data() + y.size());
  });

  m.def("tokenize", &toks);
  m.def("bleu", [](const std::string& h, const std::string& r, int n) { return bleu(toks(h), toks(r), n); },
        py::arg("hypothesis"), py::arg("reference"), py::arg("max_n") = 4);
  m.def("rouge_l", [](const std::string& h, const std::string& r, double beta) { return rouge_l(toks(h), toks(r), beta); },
        py::arg("hypothesis"), py::arg("reference"), py::arg("beta") = 1.0);
  m.def("meteor", [](const std::string& h, const std::string& r) { return meteor_like(toks(h), toks(r)); });
  m.def("collapse", [](const std::string& cls) { return collapse(parse_label_class(cls)); });
  m.def(
      "ce_metrics",
      [](const std::string& gt, const std::string& pred, const std::string& average) {
        const auto res = ce_metrics(label_sets(gt), label_sets(pred),
                                    average == "macro" ? CeAverage::Macro : CeAverage::Micro);
        return Json{{"f1", res.f1},
                    {"precision", res.precision},
                    {"recall", res.recall},
                    {"tp", res.micro.tp},
                    {"fp", res.micro.fp},
                    {"fn", res.micro.fn},
                    {"tn", res.micro.tn},
                    {"precision_zero_division", res.precision_zero_division},
                    {"recall_zero_division", res.recall_zero_division}}
            .dump();
      },
      py::arg("ground_truth"), py::arg("predicted"), py::arg("average") = "micro");
  m.def("label_findings", [](const std::string& text) {
    RuleLabeler labeler;
    return labels_to_json(label_findings(text, labeler)).dump();
  });

  m.def(
      "synth",
      [](const std::string& dir, std::uint64_t seed, std::size_t patients, std::size_t token_dim) {
        SyntheticSpec spec;
        spec.patient_count = patients;
        spec.token_dim = token_dim;
        const auto files = write_synthetic_corpus(synth_corpus(spec, seed), dir);
        return std::vector<std::string>{files.reports, files.annotations, files.metadata, files.tokens,
                                        files.sidecar};
      },
      py::arg("output_dir"), py::arg("seed") = 0, py::arg("patients") = 50, py::arg("token_dim") = 64);
  m.def(
      "run_pipeline",
      [](const std::map<std::string, std::string>& settings, const std::string& config_file) {
        auto cfg = config_file.empty() ? PipelineConfig{} : PipelineConfig::load(config_file);
        for (const auto& [k, v] : settings) cfg.set(k, v);
        py::gil_scoped_release release;
        return run_pipeline(cfg).dump();
      },
      py::arg("settings"), py::arg("config_file") = "");
}
