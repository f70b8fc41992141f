#include <chrono>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "radctl/anatomy_graph.hpp"
#include "radctl/disjoint_set.hpp"
#include "radctl/error.hpp"
#include "radctl/io.hpp"
#include "radctl/synth.hpp"

using namespace radctl;

namespace {

const RegionVocabulary& V() { return default_region_vocabulary(); }

std::vector<oracle::Component> as_components(const ValidPartition& p) {
  std::vector<oracle::Component> out;
  for (const auto& s : p.subsets) out.push_back({s.pair_indices, s.regions});
  return out;
}

}  // namespace

TEST_CASE("disjoint set") {
  DisjointSet ds(5);
  CHECK(ds.unite(0, 1));
  CHECK(ds.unite(3, 4));
  CHECK_FALSE(ds.unite(1, 0));
  CHECK(ds.find(0) == ds.find(1));
  CHECK(ds.find(2) != ds.find(0));
  CHECK(ds.unite(1, 4));
  CHECK(ds.find(3) == ds.find(0));
}

TEST_CASE("worked example: four subsets") {
  const auto report = fixture::worked_report();
  const auto p = find_valid_subsets(report);
  REQUIRE(p.size() == 4);
  CHECK(p.subsets[0].regions == V().ids({"mediastinum"}));
  CHECK(p.subsets[0].pair_indices == std::vector<std::size_t>{0});
  CHECK(p.subsets[1].regions == V().ids({"right lung", "left lung"}));
  CHECK(p.subsets[1].pair_indices == std::vector<std::size_t>{1, 2, 3, 4});
  CHECK(p.subsets[2].regions == V().ids({"left clavicle", "right clavicle"}));
  CHECK(p.subsets[2].pair_indices == std::vector<std::size_t>{5});
  CHECK(p.subsets[3].regions == V().ids({"abdomen"}));
  CHECK(p.subsets[3].target_text == "NG tube tip positioned correctly in stomach. No free air under diaphragm.");
  CHECK(validate_partition(report, p).valid);
}

TEST_CASE("single pair gives one subset") {
  AnnotatedReport r;
  r.report_id = "one";
  r.pairs.push_back({0, "Lungs clear.", V().ids({"left lung", "right lung"})});
  const auto p = find_valid_subsets(r);
  CHECK(p.size() == 1);
  CHECK(oracle::fixed_point_components(r).size() == 1);
}

TEST_CASE("empty and unlocalized-only reports") {
  AnnotatedReport r;
  r.report_id = "e";
  CHECK(find_valid_subsets(r).empty());
  r.pairs.push_back({0, "No change is seen.", {}});
  const auto p = find_valid_subsets(r);
  CHECK(p.empty());
  CHECK(p.unlocalized.size() == 1);
  try {
    sample_dropout(p, 1);
    FAIL("expected EmptyPartition");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyPartition);
  }
}

TEST_CASE("splitting the lung sentences violates C1") {
  const auto report = fixture::worked_report();
  auto p = find_valid_subsets(report);
  SubsetEntry right = p.subsets[1], rest = p.subsets[1];
  right.pair_indices = {1};
  right.sentences = {report.pairs[1].text};
  right.regions = V().ids({"right lung"});
  right.target_text = report.pairs[1].text;
  rest.pair_indices = {2, 3, 4};
  rest.sentences = {report.pairs[2].text, report.pairs[3].text, report.pairs[4].text};
  p.subsets[1] = right;
  p.subsets.insert(p.subsets.begin() + 2, rest);
  const auto check = validate_partition(report, p);
  CHECK_FALSE(check.valid);
  bool c1 = false;
  for (const auto& d : check.diagnostics) c1 |= d.find("C1") != std::string::npos;
  CHECK(c1);
}

TEST_CASE("C2 violation is reported") {
  const auto report = fixture::worked_report();
  auto p = find_valid_subsets(report);
  p.subsets[0].regions.insert(V().id("spine"));
  const auto check = validate_partition(report, p);
  CHECK_FALSE(check.valid);
  bool c2 = false;
  for (const auto& d : check.diagnostics) c2 |= d.find("C2") != std::string::npos;
  CHECK(c2);
}

TEST_CASE("random reports: oracle equivalence, validity, partition properties") {
  SeededRng rng(99);
  for (int t = 0; t < 500; ++t) {
    const auto r = fixture::random_report(rng);
    const auto p = find_valid_subsets(r);
    const auto got = as_components(p);
    CHECK(got == oracle::bfs_components(r));
    CHECK(got == oracle::fixed_point_components(r));
    CHECK(validate_partition(r, p).valid);

    // Disjoint in sentences and regions, covering every localized sentence.
    std::set<std::size_t> sentences;
    RegionSet regions;
    for (const auto& s : p.subsets) {
      for (auto i : s.pair_indices) CHECK(sentences.insert(i).second);
      for (auto g : s.regions) CHECK(regions.insert(g).second);
    }
    CHECK(sentences.size() == r.pairs.size() - r.unlocalized_count());
    CHECK(p.unlocalized.size() == r.unlocalized_count());

    // Minimality: the overlap graph inside each subset is connected.
    for (const auto& s : p.subsets) {
      AnnotatedReport sub;
      for (auto i : s.pair_indices) sub.pairs.push_back(r.pairs[i]);
      CHECK(oracle::bfs_components(sub).size() == 1);
    }
  }
}

TEST_CASE("sample_dropout") {
  const auto report = fixture::worked_report();
  const auto p = find_valid_subsets(report);

  SUBCASE("K = 1 forces the full localized report") {
    AnnotatedReport r;
    r.report_id = "k1";
    r.pairs = {{0, "Lungs clear.", V().ids({"left lung", "right lung"})}, {1, "No change is seen.", {}}};
    const auto part = find_valid_subsets(r);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto s = sample_dropout(part, seed);
      CHECK(s.full_report);
      CHECK(s.target_regions == r.regions());
      CHECK(s.target_text == "Lungs clear. No change is seen.");
      CHECK(check_dropout_sample(r, s).valid);
    }
  }
  SUBCASE("abdomen-only selection") {
    bool found = false;
    for (std::uint64_t seed = 0; seed < 500 && !found; ++seed) {
      const auto s = sample_dropout(p, seed);
      if (s.selected_subsets != std::vector<std::size_t>{3}) continue;
      found = true;
      CHECK(s.target_regions == V().ids({"abdomen"}));
      CHECK(s.target_text == "NG tube tip positioned correctly in stomach. No free air under diaphragm.");
      CHECK(s.input_mask[V().id("abdomen").value]);
      CHECK_FALSE(s.input_mask[V().id("mediastinum").value]);
    }
    CHECK(found);
  }
  SUBCASE("determinism") {
    CHECK(sample_dropout(p, 12345) == sample_dropout(p, 12345));
    CHECK(dropout_seed(1, "a", 0) != dropout_seed(1, "a", 1));
    CHECK(dropout_seed(1, "a", 0) == dropout_seed(1, "a", 0));
  }
  SUBCASE("target keeps report order") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto s = sample_dropout(p, seed);
      CHECK(std::is_sorted(s.target_sentences.begin(), s.target_sentences.end()));
      CHECK(check_dropout_sample(report, s).valid);
    }
  }
  SUBCASE("full_report_probability = 1 always draws everything") {
    SamplerOptions opt;
    opt.full_report_probability = 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(sample_dropout(p, seed, opt).full_report);
  }
  SUBCASE("cardinality is uniform on 1..K") {
    std::vector<int> counts(5, 0);
    const int n = 8000;
    for (int i = 0; i < n; ++i) ++counts[sample_dropout(p, splitmix64(i)).selected_subsets.size()];
    for (int m = 1; m <= 4; ++m) CHECK(std::abs(counts[m] / double(n) - 0.25) < 0.02);
  }
}

TEST_CASE("check_dropout_sample catches tampering") {
  const auto report = fixture::worked_report();
  const auto p = find_valid_subsets(report);
  auto s = sample_dropout(p, 3);
  SUBCASE("dropped sentence") {
    s.selected_subsets = {1};
    s.target_regions = p.subsets[1].regions;
    s.target_sentences = {1, 2};
    s.target_text = report.pairs[1].text + " " + report.pairs[2].text;
    s.input_mask.assign(36, false);
    for (auto r : s.target_regions) s.input_mask[r.value] = true;
    CHECK_FALSE(check_dropout_sample(report, s).valid);
  }
  SUBCASE("extra region") {
    s.target_regions.insert(V().id("spine"));
    CHECK_FALSE(check_dropout_sample(report, s).valid);
  }
  SUBCASE("mask mismatch") {
    s.input_mask.flip();
    CHECK_FALSE(check_dropout_sample(report, s).valid);
  }
}

TEST_CASE("unlocalized sentences only in full-report targets") {
  AnnotatedReport r;
  r.report_id = "u";
  r.pairs = {{0, "Heart normal.", V().ids({"cardiac silhouette"})},
             {1, "No change is seen.", {}},
             {2, "Spine intact.", V().ids({"spine"})}};
  const auto p = find_valid_subsets(r);
  REQUIRE(p.size() == 2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = sample_dropout(p, seed);
    const bool has_unloc = std::find(s.target_sentences.begin(), s.target_sentences.end(), 1) != s.target_sentences.end();
    CHECK(has_unloc == s.full_report);
    CHECK(check_dropout_sample(r, s).valid);
  }
}

TEST_CASE("partial evaluation set") {
  std::vector<AnnotatedReport> one{fixture::worked_report()};
  const auto inst = build_partial_eval_set(one);
  REQUIRE(inst.size() == 4);
  CHECK(inst[3].target_regions == V().ids({"abdomen"}));
  CHECK(build_partial_eval_set(std::vector<AnnotatedReport>{}).empty());

  SeededRng rng(8);
  std::vector<AnnotatedReport> reports;
  std::size_t sum_k = 0;
  for (int i = 0; i < 500; ++i) {
    reports.push_back(fixture::random_report(rng));
    reports.back().report_id = "r" + std::to_string(i);
    sum_k += oracle::bfs_components(reports.back()).size();
  }
  CHECK(build_partial_eval_set(reports).size() == sum_k);
}

TEST_CASE("synthetic corpus partitions match the generator's truth") {
  SyntheticSpec spec;
  spec.patient_count = 15;
  spec.token_dim = 4;
  const auto corpus = synth_corpus(spec, 21);
  std::map<std::string, std::vector<AnnotationRecord>> by;
  for (const auto& a : corpus.annotations) by[a.report_id].push_back(a);
  for (const auto& truth : corpus.sidecar["reports"]) {
    const auto id = truth["report_id"].get<std::string>();
    const auto p = find_valid_subsets(parse_annotations(id, by[id]));
    REQUIRE(p.size() == truth["partition"].size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      CHECK(p.subsets[k].pair_indices == truth["partition"][k].get<std::vector<std::size_t>>());
      CHECK(V().names_of(p.subsets[k].regions) == truth["partition_regions"][k].get<std::vector<std::string>>());
    }
  }
}

TEST_CASE("partition JSON round trip") {
  const auto p = find_valid_subsets(fixture::worked_report());
  CHECK(partition_from_json(Json::parse(partition_to_json(p, V()).dump()), V()) == p);
}
