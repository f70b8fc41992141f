#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "radctl/error.hpp"
#include "radctl/io.hpp"
#include "radctl/longitudinal.hpp"

using namespace radctl;

namespace {

std::shared_ptr<const AnatomicalTokenSet> tokens_with(std::size_t present, std::size_t dim = 2) {
  auto t = std::make_shared<AnatomicalTokenSet>(36, dim);
  std::vector<double> v(dim, 0.5);
  for (std::size_t r = 0; r < present; ++r) t->set(RegionId{static_cast<std::uint16_t>(r)}, v);
  return t;
}

StudyRecord study(const std::string& id, std::int64_t t, std::vector<std::pair<View, std::size_t>> scans,
                  const std::string& patient = "p1") {
  StudyRecord s;
  s.patient_id = patient;
  s.study_id = id;
  s.report_id = "r-" + id;
  s.timestamp = Timestamp{t};
  for (std::size_t i = 0; i < scans.size(); ++i)
    s.scans.push_back({id + "-" + std::to_string(i), scans[i].first,
                       is_frontal(scans[i].first) ? tokens_with(scans[i].second) : nullptr});
  return s;
}

}  // namespace

TEST_CASE("views") {
  CHECK(parse_view("AP") == View::AP);
  CHECK(parse_view("pa") == View::PA);
  CHECK(parse_view("LL") == View::Lateral);
  CHECK(parse_view("LATERAL") == View::Lateral);
  CHECK(parse_view("SWIMMERS") == View::Other);
  CHECK(is_frontal(View::AP));
  CHECK_FALSE(is_frontal(View::Other));
}

TEST_CASE("timestamps") {
  CHECK(parse_timestamp("2150-01-01").millis + 1000 == parse_timestamp("2150-01-01T00:00:01Z").millis);
  CHECK(parse_timestamp("2150-01-01T02:00:00+02:00") == parse_timestamp("2150-01-01T00:00:00Z"));
  CHECK(parse_timestamp("2150-01-01T00:00:00.250Z").millis % 1000 == 250);
  const auto t = parse_timestamp("2151-07-04T12:34:56.789Z");
  CHECK(parse_timestamp(format_timestamp(t)) == t);
  CHECK_THROWS_AS(parse_timestamp("yesterday"), Error);
  CHECK_THROWS_AS(parse_timestamp("2150-13-01"), Error);
}

TEST_CASE("select_scan_within_study") {
  SUBCASE("most present tokens wins") {
    const auto s = study("a", 0, {{View::AP, 30}, {View::PA, 25}});
    CHECK(select_scan_within_study(s, 1) == "a-0");
  }
  SUBCASE("lateral scans never chosen") {
    const auto s = study("a", 0, {{View::Lateral, 0}, {View::PA, 5}});
    CHECK(select_scan_within_study(s, 1) == "a-1");
  }
  SUBCASE("single scan regardless of seed") {
    const auto s = study("a", 0, {{View::AP, 3}});
    for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(select_scan_within_study(s, seed) == "a-0");
  }
  SUBCASE("ties split evenly over seeds") {
    const auto s = study("a", 0, {{View::AP, 30}, {View::PA, 30}});
    int first = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) first += select_scan_within_study(s, seed) == "a-0";
    CHECK(std::abs(first / 100.0 - 0.5) <= 0.15);
    CHECK(select_scan_within_study(s, 42) == select_scan_within_study(s, 42));
  }
  SUBCASE("no frontal scan") {
    const auto s = study("a", 0, {{View::Lateral, 0}, {View::Other, 0}});
    CHECK_THROWS_AS(select_scan_within_study(s, 0), Error);
  }
}

TEST_CASE("build_longitudinal_pairs") {
  SUBCASE("strict chain") {
    std::vector<StudyRecord> h{study("s3", 3, {{View::AP, 1}}), study("s1", 1, {{View::AP, 1}}),
                               study("s2", 2, {{View::AP, 1}})};
    const auto res = build_longitudinal_pairs(h, 0);
    REQUIRE(res.pairs.size() == 3);
    CHECK(res.pairs[0].current.study_id == "s1");
    CHECK(res.pairs[0].is_initial);
    CHECK_FALSE(res.pairs[0].prior);
    CHECK(res.pairs[1].prior->study_id == "s1");
    CHECK(res.pairs[2].prior->study_id == "s2");
    CHECK_FALSE(res.pairs[2].is_initial);
  }
  SUBCASE("lateral-only earlier study is skipped") {
    std::vector<StudyRecord> h{study("s1", 1, {{View::Lateral, 0}}), study("s2", 2, {{View::PA, 4}})};
    const auto res = build_longitudinal_pairs(h, 0);
    REQUIRE(res.pairs.size() == 1);
    CHECK(res.pairs[0].current.study_id == "s2");
    CHECK(res.pairs[0].is_initial);
    CHECK(res.excluded_study_ids == std::vector<std::string>{"s1"});
  }
  SUBCASE("lateral-only study in the middle is neither current nor prior") {
    std::vector<StudyRecord> h{study("s1", 1, {{View::AP, 1}}), study("s2", 2, {{View::Lateral, 0}}),
                               study("s3", 3, {{View::PA, 1}})};
    const auto res = build_longitudinal_pairs(h, 0);
    REQUIRE(res.pairs.size() == 2);
    CHECK(res.pairs[1].prior->study_id == "s1");
  }
  SUBCASE("duplicate timestamp") {
    std::vector<StudyRecord> h{study("s1", 1, {{View::AP, 1}}), study("s2", 1, {{View::AP, 1}})};
    try {
      build_longitudinal_pairs(h, 0);
      FAIL("expected DuplicateTimestamp");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DuplicateTimestamp);
    }
  }
  SUBCASE("mixed patients") {
    std::vector<StudyRecord> h{study("s1", 1, {{View::AP, 1}}, "p1"), study("s2", 2, {{View::AP, 1}}, "p2")};
    try {
      build_longitudinal_pairs(h, 0);
      FAIL("expected MixedPatients");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MixedPatients);
    }
  }
  SUBCASE("empty") { CHECK(build_longitudinal_pairs(std::vector<StudyRecord>{}, 0).pairs.empty()); }
}

TEST_CASE("pairing properties on random histories") {
  SeededRng rng(2024);
  for (int i = 0; i < 100; ++i) {
    const auto h = fixture::random_history(rng, "p" + std::to_string(i));
    const auto res = build_longitudinal_pairs(h.studies, 9);
    std::map<std::string, const StudyRecord*> by_id;
    std::size_t eligible = 0;
    for (const auto& s : h.studies) {
      by_id[s.study_id] = &s;
      eligible += s.has_frontal();
    }
    CHECK(res.pairs.size() == eligible);
    CHECK(res.pairs.size() + res.excluded_study_ids.size() == h.studies.size());
    for (const auto& p : res.pairs) {
      CHECK(p.is_initial == !p.prior.has_value());
      if (!p.prior) continue;
      const auto* cur = by_id.at(p.current.study_id);
      const auto* pri = by_id.at(p.prior->study_id);
      CHECK(pri != cur);
      CHECK(pri->timestamp < cur->timestamp);
      for (const auto& s : h.studies)
        if (s.has_frontal()) CHECK_FALSE((pri->timestamp < s.timestamp && s.timestamp < cur->timestamp));
    }
  }
}

TEST_CASE("pairing equals the exhaustive oracle") {
  SeededRng rng(77);
  for (int i = 0; i < 50; ++i) {
    const auto h = fixture::random_history(rng, "q" + std::to_string(i));
    const auto res = build_longitudinal_pairs(h.studies, 31);
    const auto rows = oracle::brute_force_pairs(h.studies, 31);
    REQUIRE(rows.size() == res.pairs.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      CHECK(rows[k].current_scan == res.pairs[k].current.scan_id);
      CHECK(rows[k].is_initial == res.pairs[k].is_initial);
      CHECK(rows[k].prior_scan == (res.pairs[k].prior ? std::optional(res.pairs[k].prior->scan_id) : std::nullopt));
    }
  }
}

TEST_CASE("align_token_sets") {
  TokenStore store;
  AnatomicalTokenSet cur(36, 2), pri(36, 2);
  std::vector<double> a{1, 2}, b{3, 4};
  cur.set(RegionId{0}, a);
  cur.set(RegionId{1}, a);
  pri.set(RegionId{0}, b);  // region 1 undetected in the prior only
  store.insert({"s2", "c2"}, cur);
  store.insert({"s1", "c1"}, pri);

  SUBCASE("initial exam gets an all-zero prior") {
    LongitudinalPair p{"p", "r", {"s2", "c2"}, std::nullopt, true};
    const auto al = align_token_sets(p, store);
    CHECK(al.prior->region_count() == 36);
    CHECK(al.prior->present_count() == 0);
    for (std::uint16_t r = 0; r < 36; ++r)
      for (double x : al.prior->vector(RegionId{r})) CHECK(x == 0.0);
  }
  SUBCASE("aligned by region") {
    LongitudinalPair p{"p", "r", {"s2", "c2"}, ScanKey{"s1", "c1"}, false};
    const auto al = align_token_sets(p, store);
    CHECK(al.current->vector(RegionId{1})[0] == 1.0);
    CHECK(al.prior->vector(RegionId{1})[0] == 0.0);
    CHECK(al.prior->vector(RegionId{0})[1] == 4.0);
  }
  SUBCASE("missing current tokens") {
    LongitudinalPair p{"p", "r", {"s9", "c9"}, std::nullopt, true};
    try {
      align_token_sets(p, store);
      FAIL("expected MissingTokens");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingTokens);
    }
  }
  SUBCASE("shape mismatch") {
    store.insert({"s0", "c0"}, AnatomicalTokenSet(36, 3));
    LongitudinalPair p{"p", "r", {"s2", "c2"}, ScanKey{"s0", "c0"}, false};
    CHECK_THROWS_AS(align_token_sets(p, store), Error);
  }
}

TEST_CASE("metadata CSV round trip") {
  SeededRng rng(5);
  const auto h = fixture::random_history(rng, "m1");
  const auto path = std::filesystem::temp_directory_path() / "radctl_meta_test.csv";
  write_study_metadata(path, h.studies);
  const auto back = load_study_metadata(path, &h.store);
  REQUIRE(back.size() == h.studies.size());
  CHECK(build_longitudinal_pairs(back, 3).pairs == build_longitudinal_pairs(h.studies, 3).pairs);
  std::filesystem::remove(path);
}
