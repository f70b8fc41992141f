#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radctl/tokens.hpp"

namespace radctl {

enum class View { AP, PA, Lateral, Other };

/// Case-insensitive. "LL", "LAT" and "LATERAL" map to Lateral; anything
/// unrecognised maps to Other.
View parse_view(std::string_view text);
std::string_view to_string(View view) noexcept;
inline bool is_frontal(View v) noexcept { return v == View::AP || v == View::PA; }

/// Milliseconds since 1970-01-01T00:00:00Z.
struct Timestamp {
  std::int64_t millis = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Accepts YYYY-MM-DD, YYYY-MM-DDTHH:MM[:SS[.fff]] with optional 'Z' or
/// +HH:MM / -HH:MM offset. A space may replace 'T'. Throws ParseError.
Timestamp parse_timestamp(std::string_view text);
/// Formats as YYYY-MM-DDTHH:MM:SS[.fff]Z.
std::string format_timestamp(Timestamp t);

struct ScanRecord {
  std::string scan_id;
  View view = View::Other;
  std::shared_ptr<const AnatomicalTokenSet> tokens;  // null when no tokens were extracted

  std::size_t present_count() const noexcept { return tokens ? tokens->present_count() : 0; }
};

struct StudyRecord {
  std::string study_id;
  std::string patient_id;
  Timestamp timestamp;
  std::vector<ScanRecord> scans;
  std::string report_id;

  bool has_frontal() const noexcept;
};

struct LongitudinalPair {
  std::string patient_id;
  std::string report_id;  // report of the current study
  ScanKey current;
  std::optional<ScanKey> prior;
  bool is_initial = true;

  friend bool operator==(const LongitudinalPair&, const LongitudinalPair&) = default;
};

struct PairingResult {
  std::vector<LongitudinalPair> pairs;
  /// Studies with no AP/PA scan: neither currents nor priors.
  std::vector<std::string> excluded_study_ids;
};

/// Seed used for the scan choice inside one study.
std::uint64_t scan_selection_seed(std::uint64_t global_seed, const StudyRecord& study);

/// Picks the AP/PA scan with the most detected regions; ties are broken
/// uniformly with SeededRng(seed). Throws NoFrontalScan.
std::string select_scan_within_study(const StudyRecord& study, std::uint64_t seed);

/// Orders one patient's studies by time and links each frontal study to the
/// latest earlier frontal study. Throws MixedPatients, DuplicateTimestamp.
PairingResult build_longitudinal_pairs(std::span<const StudyRecord> studies, std::uint64_t global_seed);

/// Groups studies by patient and pairs each group. Output is ordered by
/// patient_id, then time.
PairingResult build_all_pairs(std::span<const StudyRecord> studies, std::uint64_t global_seed);

struct AlignedTokens {
  std::shared_ptr<const AnatomicalTokenSet> current;
  std::shared_ptr<const AnatomicalTokenSet> prior;
};

/// Looks up the current and prior token sets. Initial exams get an all-zero,
/// all-absent prior of the current's shape. Throws MissingTokens, ShapeMismatch.
AlignedTokens align_token_sets(const LongitudinalPair& pair, const TokenStore& store);

}  // namespace radctl
