#include "radctl/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "radctl/error.hpp"

namespace radctl {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) fail(ErrorCode::InvalidConfig, "bad value for '" + key + "': '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  fail(ErrorCode::InvalidConfig, "bad boolean for '" + key + "': '" + value + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  if (value.empty()) return {};
  std::filesystem::path p(value);
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value, const std::filesystem::path& base) {
  if (key == "reports") reports = resolve(base, value);
  else if (key == "annotations") annotations = resolve(base, value);
  else if (key == "metadata") metadata = resolve(base, value);
  else if (key == "tokens") tokens = resolve(base, value);
  else if (key == "output_dir") output_dir = resolve(base, value);
  else if (key == "params") params = resolve(base, value);
  else if (key == "region_vocabulary") region_vocabulary = resolve(base, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "token_dim") token_dim = parse_number<std::size_t>(key, value);
  else if (key == "embed_width") embed_width = parse_number<std::size_t>(key, value);
  else if (key == "max_positions") max_positions = parse_number<std::size_t>(key, value);
  else if (key == "text_vocab_size") text_vocab_size = parse_number<std::size_t>(key, value);
  else if (key == "samples_per_report") samples_per_report = parse_number<std::size_t>(key, value);
  else if (key == "full_report_probability") {
    if (value.empty() || value == "none") full_report_probability.reset();
    else full_report_probability = parse_number<double>(key, value);
  } else if (key == "drop_masked") drop_masked = parse_bool(key, value);
  else if (key == "ce_average") {
    if (value == "micro") ce_average = CeAverage::Micro;
    else if (value == "macro") ce_average = CeAverage::Macro;
    else fail(ErrorCode::InvalidConfig, "ce_average must be micro or macro, got '" + value + "'");
  } else if (key == "rouge_beta") rouge_beta = parse_number<double>(key, value);
  else if (key == "histogram_bin") histogram_bin = parse_number<std::size_t>(key, value);
  else fail(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read config " + path.string());
  PipelineConfig cfg;
  const auto base = path.parent_path();
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::InvalidConfig, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      cfg.set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)), base);
    } catch (const Error& e) {
      fail(ErrorCode::InvalidConfig, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

void PipelineConfig::apply_environment() {
  if (const char* dir = std::getenv("RADCTL_OUTPUT_DIR"); dir && *dir) output_dir = dir;
}

void PipelineConfig::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorCode::InvalidConfig, m); };
  if (token_dim == 0) bad("token_dim must be positive");
  if (embed_width == 0) bad("embed_width must be positive");
  if (max_positions == 0) bad("max_positions must be positive");
  if (text_vocab_size == 0) bad("text_vocab_size must be positive");
  if (histogram_bin == 0) bad("histogram_bin must be positive");
  if (!(rouge_beta > 0.0)) bad("rouge_beta must be positive");
  if (full_report_probability && !(*full_report_probability >= 0.0 && *full_report_probability <= 1.0))
    bad("full_report_probability must lie in [0, 1]");
  if (output_dir.empty()) bad("output_dir is empty");
}

void PipelineConfig::validate_inputs() const {
  validate();
  auto need = [](const std::filesystem::path& p, const char* key, bool required) {
    if (p.empty()) {
      if (required) fail(ErrorCode::InvalidConfig, std::string("missing required path '") + key + "'");
      return;
    }
    if (!std::filesystem::exists(p))
      fail(ErrorCode::InvalidConfig, std::string(key) + " path does not exist: " + p.string());
  };
  need(reports, "reports", true);
  need(annotations, "annotations", false);
  need(metadata, "metadata", true);
  need(tokens, "tokens", true);
  need(params, "params", false);
  need(region_vocabulary, "region_vocabulary", false);
}

RegionVocabulary PipelineConfig::region_vocab() const {
  if (region_vocabulary.empty()) return default_region_vocabulary();
  return RegionVocabulary(Vocabulary::load(region_vocabulary));
}

Json PipelineConfig::to_json() const {
  auto path = [](const std::filesystem::path& p) { return p.empty() ? Json(nullptr) : Json(p.generic_string()); };
  return {{"reports", path(reports)},
          {"annotations", path(annotations)},
          {"metadata", path(metadata)},
          {"tokens", path(tokens)},
          {"output_dir", path(output_dir)},
          {"params", path(params)},
          {"region_vocabulary", path(region_vocabulary)},
          {"seed", seed},
          {"token_dim", token_dim},
          {"embed_width", embed_width},
          {"max_positions", max_positions},
          {"text_vocab_size", text_vocab_size},
          {"samples_per_report", samples_per_report},
          {"full_report_probability", full_report_probability ? Json(*full_report_probability) : Json(nullptr)},
          {"drop_masked", drop_masked},
          {"ce_average", ce_average == CeAverage::Micro ? "micro" : "macro"},
          {"rouge_beta", rouge_beta},
          {"histogram_bin", histogram_bin}};
}

}  // namespace radctl
