#include "radctl/longitudinal.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <map>

#include "radctl/error.hpp"
#include "radctl/random.hpp"

namespace radctl {

namespace {

std::string upper_copy(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

class TimestampParser {
 public:
  explicit TimestampParser(std::string_view text) : text_(text) {}

  Timestamp parse() {
    const int year = digits(4);
    expect('-');
    const int month = digits(2);
    expect('-');
    const int day = digits(2);
    int hour = 0, minute = 0, second = 0, millis = 0, offset_minutes = 0;
    if (!done()) {
      if (peek() != 'T' && peek() != ' ') error();
      ++pos_;
      hour = digits(2);
      expect(':');
      minute = digits(2);
      if (!done() && peek() == ':') {
        ++pos_;
        second = digits(2);
        if (!done() && peek() == '.') {
          ++pos_;
          int scale = 100;
          const std::size_t first = pos_;
          while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
            millis += (peek() - '0') * scale;
            scale /= 10;
            ++pos_;
          }
          if (pos_ == first) error();
        }
      }
      if (!done()) {
        if (peek() == 'Z') {
          ++pos_;
        } else if (peek() == '+' || peek() == '-') {
          const int sign = peek() == '+' ? 1 : -1;
          ++pos_;
          const int oh = digits(2);
          expect(':');
          const int om = digits(2);
          offset_minutes = sign * (oh * 60 + om);
        }
      }
    }
    if (!done()) error();

    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) error();
    const auto days = sys_days{ymd}.time_since_epoch().count();
    const std::int64_t secs = static_cast<std::int64_t>(days) * 86400 + hour * 3600 + minute * 60 + second -
                              static_cast<std::int64_t>(offset_minutes) * 60;
    return Timestamp{secs * 1000 + millis};
  }

 private:
  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  [[noreturn]] void error() const {
    fail(ErrorCode::ParseError, "invalid ISO-8601 timestamp '" + std::string(text_) + "'");
  }
  void expect(char c) {
    if (done() || peek() != c) error();
    ++pos_;
  }
  int digits(int n) {
    int v = 0;
    for (int i = 0; i < n; ++i) {
      if (done() || !std::isdigit(static_cast<unsigned char>(peek()))) error();
      v = v * 10 + (peek() - '0');
      ++pos_;
    }
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct SelectedStudy {
  const StudyRecord* study;
  std::string scan_id;
};

}  // namespace

View parse_view(std::string_view text) {
  const std::string u = upper_copy(text);
  if (u == "AP") return View::AP;
  if (u == "PA") return View::PA;
  if (u == "LATERAL" || u == "LL" || u == "LAT") return View::Lateral;
  return View::Other;
}

std::string_view to_string(View view) noexcept {
  switch (view) {
    case View::AP: return "AP";
    case View::PA: return "PA";
    case View::Lateral: return "LATERAL";
    case View::Other: return "OTHER";
  }
  return "OTHER";
}

Timestamp parse_timestamp(std::string_view text) { return TimestampParser(text).parse(); }

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  std::int64_t ms = t.millis;
  std::int64_t secs = ms >= 0 ? ms / 1000 : -((-ms + 999) / 1000);
  const int millis = static_cast<int>(ms - secs * 1000);
  std::int64_t days = secs >= 0 ? secs / 86400 : -((-secs + 86399) / 86400);
  const std::int64_t rem = secs - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[40];
  const int h = static_cast<int>(rem / 3600), m = static_cast<int>((rem / 60) % 60), s = static_cast<int>(rem % 60);
  if (millis != 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), h, m, s, millis);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), h, m, s);
  }
  return buf;
}

bool StudyRecord::has_frontal() const noexcept {
  return std::any_of(scans.begin(), scans.end(), [](const ScanRecord& s) { return is_frontal(s.view); });
}

std::uint64_t scan_selection_seed(std::uint64_t global_seed, const StudyRecord& study) {
  return derive_seed(global_seed, {"scan", study.patient_id, study.study_id});
}

std::string select_scan_within_study(const StudyRecord& study, std::uint64_t seed) {
  std::vector<const ScanRecord*> best;
  std::size_t best_count = 0;
  for (const auto& scan : study.scans) {
    if (!is_frontal(scan.view)) continue;
    const std::size_t count = scan.present_count();
    if (best.empty() || count > best_count) {
      best.assign(1, &scan);
      best_count = count;
    } else if (count == best_count) {
      best.push_back(&scan);
    }
  }
  if (best.empty()) fail(ErrorCode::NoFrontalScan, "study '" + study.study_id + "'");
  if (best.size() == 1) return best.front()->scan_id;
  SeededRng rng(seed);
  return best[rng.uniform_index(best.size())]->scan_id;
}

PairingResult build_longitudinal_pairs(std::span<const StudyRecord> studies, std::uint64_t global_seed) {
  PairingResult result;
  if (studies.empty()) return result;

  std::vector<const StudyRecord*> ordered;
  ordered.reserve(studies.size());
  for (const auto& s : studies) {
    if (s.patient_id != studies.front().patient_id)
      fail(ErrorCode::MixedPatients,
           "patients '" + studies.front().patient_id + "' and '" + s.patient_id + "' in one history");
    ordered.push_back(&s);
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const StudyRecord* a, const StudyRecord* b) { return a->timestamp < b->timestamp; });
  for (std::size_t i = 1; i < ordered.size(); ++i)
    if (ordered[i]->timestamp == ordered[i - 1]->timestamp)
      fail(ErrorCode::DuplicateTimestamp, "studies '" + ordered[i - 1]->study_id + "' and '" +
                                              ordered[i]->study_id + "' of patient '" + ordered[i]->patient_id +
                                              "' share " + format_timestamp(ordered[i]->timestamp));

  std::optional<SelectedStudy> previous;
  for (const StudyRecord* study : ordered) {
    if (!study->has_frontal()) {
      result.excluded_study_ids.push_back(study->study_id);
      continue;
    }
    SelectedStudy selected{study, select_scan_within_study(*study, scan_selection_seed(global_seed, *study))};
    LongitudinalPair pair;
    pair.patient_id = study->patient_id;
    pair.report_id = study->report_id;
    pair.current = ScanKey{study->study_id, selected.scan_id};
    if (previous) {
      pair.prior = ScanKey{previous->study->study_id, previous->scan_id};
      pair.is_initial = false;
    }
    result.pairs.push_back(std::move(pair));
    previous = std::move(selected);
  }
  return result;
}

PairingResult build_all_pairs(std::span<const StudyRecord> studies, std::uint64_t global_seed) {
  std::map<std::string, std::vector<StudyRecord>> by_patient;
  for (const auto& s : studies) by_patient[s.patient_id].push_back(s);
  PairingResult all;
  for (const auto& [patient, history] : by_patient) {
    auto part = build_longitudinal_pairs(history, global_seed);
    std::move(part.pairs.begin(), part.pairs.end(), std::back_inserter(all.pairs));
    std::move(part.excluded_study_ids.begin(), part.excluded_study_ids.end(),
              std::back_inserter(all.excluded_study_ids));
  }
  return all;
}

AlignedTokens align_token_sets(const LongitudinalPair& pair, const TokenStore& store) {
  AlignedTokens out;
  out.current = store.find(pair.current);
  if (!out.current)
    fail(ErrorCode::MissingTokens, "current scan '" + pair.current.scan_id + "' of study '" +
                                       pair.current.study_id + "'");
  if (pair.is_initial || !pair.prior) {
    out.prior = std::make_shared<const AnatomicalTokenSet>(out.current->region_count(), out.current->dim());
    return out;
  }
  out.prior = store.find(*pair.prior);
  if (!out.prior)
    fail(ErrorCode::MissingTokens, "prior scan '" + pair.prior->scan_id + "' of study '" + pair.prior->study_id + "'");
  if (out.prior->region_count() != out.current->region_count() || out.prior->dim() != out.current->dim())
    fail(ErrorCode::ShapeMismatch, "prior and current token sets differ in shape for study '" +
                                       pair.current.study_id + "'");
  return out;
}

}  // namespace radctl
