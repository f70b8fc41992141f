#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "radctl/corpus.hpp"
#include "radctl/longitudinal.hpp"
#include "radctl/random.hpp"
#include "radctl/tokens.hpp"

namespace fixture {

// The worked example report: eight sentences, four valid subsets.
inline std::vector<radctl::AnnotationRecord> worked_records() {
  const std::string id = "worked";
  return {
      {id, 0, "The mediastinum is mildly enlarged.", {"mediastinum"}},
      {id, 1, "Blunting of right costophrenic angle noted.", {"right lung"}},
      {id, 2, "No suspicious nodules seen.", {"left lung", "right lung"}},
      {id, 3, "No pneumothorax or infective consolidation.", {"left lung", "right lung"}},
      {id, 4, "Bilateral atelectasis, likely post-operative.", {"left lung", "right lung"}},
      {id, 5, "Degenerative changes seen in both shoulders.", {"left clavicle", "right clavicle"}},
      {id, 6, "NG tube tip positioned correctly in stomach.", {"abdomen"}},
      {id, 7, "No free air under diaphragm.", {"abdomen"}},
  };
}

inline radctl::AnnotatedReport worked_report() {
  const auto records = worked_records();
  return radctl::parse_annotations("worked", records);
}

inline const char* worked_raw() {
  return "INDICATION: Post-operative check.\n\nFINDINGS: The mediastinum is mildly enlarged. Blunting of right "
         "costophrenic angle noted. No suspicious nodules seen. No pneumothorax or infective consolidation. "
         "Bilateral atelectasis, likely post-operative. Degenerative changes seen in both shoulders. NG tube tip "
         "positioned correctly in stomach. No free air under diaphragm.\n\nIMPRESSION: Stable.";
}

// Random report: up to `max_sentences` sentences over a pool of at most
// `max_regions` regions; each sentence names 0-3 pool regions.
inline radctl::AnnotatedReport random_report(radctl::SeededRng& rng, std::size_t max_sentences = 12,
                                             std::size_t max_regions = 8, std::size_t region_count = 36) {
  std::vector<std::uint16_t> all(region_count);
  for (std::size_t i = 0; i < region_count; ++i) all[i] = static_cast<std::uint16_t>(i);
  const auto pool_size = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_regions)));
  for (std::size_t i = 0; i < pool_size; ++i) std::swap(all[i], all[i + rng.uniform_index(region_count - i)]);

  radctl::AnnotatedReport r;
  r.report_id = "rand";
  const auto n = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(max_sentences)));
  for (std::size_t s = 0; s < n; ++s) {
    radctl::SentenceAnatomyPair p;
    p.sentence_index = s;
    p.text = "Sentence " + std::to_string(s) + ".";
    const auto k = rng.bernoulli(0.1) ? 0 : rng.uniform_int(1, 3);
    for (std::int64_t j = 0; j < k; ++j) p.regions.insert(radctl::RegionId{all[rng.uniform_index(pool_size)]});
    r.findings_text += (s ? " " : "") + p.text;
    r.pairs.push_back(std::move(p));
  }
  return r;
}

// Random history of one patient: mixed AP/PA/lateral/other scans, distinct
// timestamps in shuffled input order, present-token counts drawn from a
// narrow range so ties are common.
struct History {
  std::vector<radctl::StudyRecord> studies;
  radctl::TokenStore store;
};

inline History random_history(radctl::SeededRng& rng, const std::string& patient, std::size_t region_count = 36,
                              std::size_t dim = 2) {
  History h;
  const auto n = static_cast<std::size_t>(rng.uniform_int(1, 7));
  std::vector<std::int64_t> times;
  while (times.size() < n) {
    const auto t = rng.uniform_int(0, 50) * 1000;
    if (std::find(times.begin(), times.end(), t) == times.end()) times.push_back(t);
  }
  for (std::size_t i = 0; i < n; ++i) {
    radctl::StudyRecord s;
    s.patient_id = patient;
    s.study_id = patient + "-s" + std::to_string(i);
    s.report_id = patient + "-r" + std::to_string(i);
    s.timestamp = radctl::Timestamp{times[i]};
    const auto scans = rng.uniform_int(1, 3);
    for (std::int64_t k = 0; k < scans; ++k) {
      radctl::ScanRecord sc;
      sc.scan_id = s.study_id + "-" + std::to_string(k);
      const double u = rng.uniform01();
      sc.view = u < 0.35 ? radctl::View::AP : u < 0.65 ? radctl::View::PA : u < 0.9 ? radctl::View::Lateral
                                                                                    : radctl::View::Other;
      if (radctl::is_frontal(sc.view)) {
        radctl::AnatomicalTokenSet t(region_count, dim);
        const auto present = static_cast<std::size_t>(rng.uniform_int(30, 32));
        std::vector<double> v(dim, 1.0);
        for (std::size_t r = 0; r < present; ++r) t.set(radctl::RegionId{static_cast<std::uint16_t>(r)}, v);
        h.store.insert({s.study_id, sc.scan_id}, std::move(t));
        sc.tokens = h.store.find({s.study_id, sc.scan_id});
      }
      s.scans.push_back(std::move(sc));
    }
    h.studies.push_back(std::move(s));
  }
  return h;
}

}  // namespace fixture
