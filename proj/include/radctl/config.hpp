#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "radctl/io.hpp"
#include "radctl/metrics/clinical.hpp"

namespace radctl {

/// Run configuration. Read from a plain-text file of `key = value` lines
/// ('#' starts a comment); relative paths resolve against the file's
/// directory. See README for the full key list.
struct PipelineConfig {
  std::filesystem::path reports;       // raw reports, {"report_id", "text"} per line
  std::filesystem::path annotations;   // optional sentence-region annotations
  std::filesystem::path metadata;      // study metadata CSV
  std::filesystem::path tokens;        // anatomical tokens
  std::filesystem::path output_dir = "radctl_out";
  std::filesystem::path params;        // optional projection parameters; random when empty
  std::filesystem::path region_vocabulary;  // optional; built-in list when empty

  std::uint64_t seed = 0;
  std::size_t token_dim = kDefaultTokenDim;
  std::size_t embed_width = 64;
  std::size_t max_positions = 512;
  std::size_t text_vocab_size = 4096;

  std::size_t samples_per_report = 2;
  std::optional<double> full_report_probability;
  bool drop_masked = false;

  CeAverage ce_average = CeAverage::Micro;
  double rouge_beta = 1.0;
  std::size_t histogram_bin = 10;

  /// Throws InvalidConfig on an unknown key or a malformed value.
  void set(const std::string& key, const std::string& value, const std::filesystem::path& base = {});

  /// Throws InvalidConfig (and IoError when the file cannot be read).
  static PipelineConfig load(const std::filesystem::path& path);

  /// RADCTL_OUTPUT_DIR replaces output_dir when set and non-empty.
  void apply_environment();

  /// Value checks only. Throws InvalidConfig.
  void validate() const;

  /// Also requires the input files to exist. Throws InvalidConfig.
  void validate_inputs() const;

  RegionVocabulary region_vocab() const;

  Json to_json() const;
};

}  // namespace radctl
