#include <cstring>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "radctl/error.hpp"
#include "radctl/fusion.hpp"
#include "radctl/generator.hpp"
#include "radctl/io.hpp"
#include "radctl/metrics/text.hpp"

using namespace radctl;

namespace {

// d = 2: every layer 4 x 4, hand-picked so each term is distinguishable.
ProjectionParams toy_params() {
  ProjectionParams p;
  p.fc1_weight.resize(4, 4);
  p.fc1_weight << 1, 2, 0, -1,  //
      0.5, 0, 1, 0,             //
      -1, 1, 1, 1,              //
      0, 0, 2, 3;
  p.fc1_bias = Vector::Map(std::vector<double>{0.1, -0.2, 0.3, 0}.data(), 4);
  p.bn_gamma = Vector::Map(std::vector<double>{1, 2, 0.5, 1.5}.data(), 4);
  p.bn_beta = Vector::Map(std::vector<double>{0, 0.1, -0.1, 0.2}.data(), 4);
  p.bn_running_mean = Vector::Map(std::vector<double>{0.5, 0, -0.5, 1}.data(), 4);
  p.bn_running_var = Vector::Map(std::vector<double>{1, 4, 0.25, 2}.data(), 4);
  p.bn_epsilon = 1e-5;
  p.fc2_weight.resize(4, 4);
  p.fc2_weight << 1, 0, 0, 1,  //
      0, 1, -1, 0,             //
      2, 0, 1, 0,              //
      0, -1, 0, 0.5;
  p.fc2_bias = Vector::Map(std::vector<double>{0, 1, -1, 0.5}.data(), 4);
  return p;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

AnatomicalTokenSet random_tokens(SeededRng& rng, std::size_t regions, std::size_t dim, double detect = 0.8) {
  AnatomicalTokenSet t(regions, dim);
  std::vector<double> v(dim);
  for (std::size_t r = 0; r < regions; ++r) {
    if (!rng.bernoulli(detect)) continue;
    for (auto& x : v) x = rng.uniform(-1, 1);
    t.set(RegionId{static_cast<std::uint16_t>(r)}, v);
  }
  return t;
}

}  // namespace

TEST_CASE("identity configuration is the identity map") {
  const auto p = ProjectionParams::identity(6);
  std::vector<double> x{1, -2, 3.5, 0, 7, -0.25};
  CHECK(to_std(mlp_forward(x, p)) == x);
}

TEST_CASE("d = 2 toy matches the scalar oracle") {
  const auto p = toy_params();
  for (const auto& x : std::vector<std::vector<double>>{{1, 0, 0, 0}, {0, 0, 0, 0}, {0.3, -1.2, 2, 0.7}}) {
    const auto got = mlp_forward(x, p);
    const auto want = oracle::mlp(x, p);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(got(i) - want[i]) <= 1e-9);
  }
}

TEST_CASE("f(0) with nonzero biases") {
  const auto p = toy_params();
  const std::vector<double> zero(4, 0.0);
  const auto got = mlp_forward(zero, p);
  // W2 (gamma * (b1 - mean) / sqrt(var + eps) + beta) + b2, written out.
  std::vector<double> h(4);
  for (int i = 0; i < 4; ++i)
    h[i] = p.bn_gamma(i) * (p.fc1_bias(i) - p.bn_running_mean(i)) / std::sqrt(p.bn_running_var(i) + p.bn_epsilon) +
           p.bn_beta(i);
  for (int i = 0; i < 4; ++i) {
    double y = p.fc2_bias(i);
    for (int j = 0; j < 4; ++j) y += p.fc2_weight(i, j) * h[j];
    CHECK(std::abs(got(i) - y) <= 1e-12);
  }
}

TEST_CASE("parameter validation") {
  auto p = toy_params();
  std::vector<double> bad(3, 0.0);
  CHECK_THROWS_AS(mlp_forward(bad, p), Error);
  p.bn_running_var(0) = -1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = toy_params();
  p.fc2_weight.resize(4, 3);
  CHECK_THROWS_AS(p.validate(), Error);
  CHECK_NOTHROW(ProjectionParams::random(3, 1).validate());
}

TEST_CASE("random params are reproducible and round-trip through JSON") {
  const auto a = ProjectionParams::random(4, 17), b = ProjectionParams::random(4, 17);
  CHECK(a.fc1_weight == b.fc1_weight);
  CHECK(a.fc2_bias == b.fc2_bias);
  const auto back = params_from_json(Json::parse(params_to_json(a).dump()));
  CHECK(back.fc1_weight == a.fc1_weight);
  CHECK(back.bn_running_var == a.bn_running_var);
  CHECK(back.bn_epsilon == a.bn_epsilon);
}

TEST_CASE("build_joint_representation") {
  const auto p = toy_params();
  SUBCASE("empty target: every row is f(0)") {
    SeededRng rng(1);
    const auto cur = random_tokens(rng, 36, 2), pri = random_tokens(rng, 36, 2);
    const auto j = build_joint_representation(cur, pri, {}, p);
    const auto f0 = mlp_forward(std::vector<double>(4, 0.0), p);
    for (std::uint16_t r = 0; r < 36; ++r) {
      CHECK_FALSE(j.in_target[r]);
      CHECK(std::memcmp(j.row(RegionId{r}).data(), f0.data(), 4 * sizeof(double)) == 0);
    }
  }
  SUBCASE("initial exam: prior half is zero") {
    AnatomicalTokenSet cur(36, 2), zero(36, 2);
    std::vector<double> v{0.4, -0.9};
    cur.set(RegionId{3}, v);
    const auto j = build_joint_representation(cur, zero, {RegionId{3}}, p);
    const auto want = oracle::mlp({0.4, -0.9, 0, 0}, p);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(j.row(RegionId{3})[i] - want[i]) <= 1e-9);
  }
  SUBCASE("three regions, one masked, against the oracle") {
    AnatomicalTokenSet cur(3, 2), pri(3, 2);
    const std::vector<std::vector<double>> cv{{1, 2}, {-1, 0.5}, {0.25, 0.75}}, pv{{0, 1}, {3, -2}, {1, 1}};
    for (std::uint16_t r = 0; r < 3; ++r) {
      cur.set(RegionId{r}, cv[r]);
      pri.set(RegionId{r}, pv[r]);
    }
    const auto j = build_joint_representation(cur, pri, {RegionId{0}, RegionId{2}}, p);
    for (std::uint16_t r = 0; r < 3; ++r) {
      std::vector<double> x(4, 0.0);
      if (r != 1) x = {cv[r][0], cv[r][1], pv[r][0], pv[r][1]};
      const auto want = oracle::mlp(x, p);
      for (int i = 0; i < 4; ++i) CHECK(std::abs(j.row(RegionId{r})[i] - want[i]) <= 1e-9);
    }
    CHECK_FALSE(j.in_target[1]);
  }
  SUBCASE("errors") {
    AnatomicalTokenSet cur(3, 2), pri(3, 3);
    CHECK_THROWS_AS(build_joint_representation(cur, pri, {}, p), Error);
    AnatomicalTokenSet pri2(3, 2);
    try {
      build_joint_representation(cur, pri2, {RegionId{7}}, p);
      FAIL("expected UnknownRegion");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownRegion);
    }
  }
}

TEST_CASE("affine property on random parameters") {
  const auto p = ProjectionParams::random(8, 5);
  SeededRng rng(6);
  const auto f0 = mlp_forward(std::vector<double>(16, 0.0), p);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(16), y(16), xy(16);
    for (int i = 0; i < 16; ++i) {
      x[i] = rng.uniform(-2, 2);
      y[i] = rng.uniform(-2, 2);
      xy[i] = x[i] + y[i];
    }
    const Vector lhs = mlp_forward(xy, p) - f0;
    const Vector rhs = (mlp_forward(x, p) - f0) + (mlp_forward(y, p) - f0);
    CHECK((lhs - rhs).norm() <= 1e-9 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("masking locality") {
  const auto p = ProjectionParams::random(4, 3);
  SeededRng rng(4);
  auto cur = random_tokens(rng, 36, 4, 1.0);
  auto pri = random_tokens(rng, 36, 4, 1.0);
  const RegionSet target{RegionId{1}, RegionId{5}};
  const auto before = build_joint_representation(cur, pri, target, p);
  std::vector<double> noise{9, 9, 9, 9};
  for (std::uint16_t r = 0; r < 36; ++r)
    if (!target.count(RegionId{r})) {
      cur.set(RegionId{r}, noise);
      pri.clear(RegionId{r});
    }
  const auto after = build_joint_representation(cur, pri, target, p);
  CHECK(std::memcmp(before.values.data(), after.values.data(), sizeof(double) * before.values.size()) == 0);
}

TEST_CASE("assemble_multimodal_input") {
  const auto p = ProjectionParams::identity(4);
  AnatomicalTokenSet cur(36, 2), pri(36, 2);
  const auto joint = build_joint_representation(cur, pri, {RegionId{0}}, p);

  SUBCASE("zero tables give a zero sequence") {
    const auto t = EmbedTables::zeros(10, 64, 8, 4);
    const std::vector<std::uint32_t> ids{1, 2, 3};
    const auto seq = assemble_multimodal_input(joint, ids, t);
    CHECK(seq.size() == 39);
    CHECK(seq.embeddings.isZero(0));
    for (std::size_t i = 0; i < seq.size(); ++i) CHECK(seq.positions[i] == i);
    CHECK(seq.segments[35] == Segment::Vision);
    CHECK(seq.segments[36] == Segment::Text);
  }
  SUBCASE("empty indication") {
    const auto t = EmbedTables::zeros(10, 64, 8, 4);
    const auto seq = assemble_multimodal_input(joint, {}, t);
    CHECK(seq.size() == 36);
    CHECK(std::count(seq.masked.begin(), seq.masked.end(), true) == 35);
  }
  SUBCASE("hand oracle at width 4") {
    auto t = EmbedTables::random(10, 64, 4, 4, 2);
    AnatomicalTokenSet c2(36, 2);
    std::vector<double> v{0.5, -1};
    c2.set(RegionId{0}, v);
    const auto j2 = build_joint_representation(c2, pri, {RegionId{0}}, p);
    const std::vector<std::uint32_t> ids{7};
    const auto seq = assemble_multimodal_input(j2, ids, t);
    for (int k = 0; k < 4; ++k) {
      double adapted = 0;
      for (int m = 0; m < 4; ++m) adapted += t.adapter(k, m) * j2.row(RegionId{0})[m];
      CHECK(std::abs(seq.embeddings(0, k) - (adapted + t.position(0, k) + t.segment(0, k))) <= 1e-12);
      CHECK(std::abs(seq.embeddings(36, k) - (t.token(7, k) + t.position(36, k) + t.segment(1, k))) <= 1e-12);
    }
  }
  SUBCASE("drop_masked keeps only targets") {
    const auto t = EmbedTables::zeros(10, 64, 8, 4);
    const auto seq = assemble_multimodal_input(joint, {}, t, AssemblyOptions{true});
    CHECK(seq.size() == 1);
    CHECK(seq.regions[0] == RegionId{0});
  }
  SUBCASE("position overflow") {
    const auto t = EmbedTables::zeros(10, 37, 8, 4);
    const std::vector<std::uint32_t> ids{1, 2};
    try {
      assemble_multimodal_input(joint, ids, t);
      FAIL("expected PositionOverflow");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PositionOverflow);
    }
  }
  SUBCASE("adapter width mismatch") {
    const auto t = EmbedTables::zeros(10, 64, 8, 5);
    CHECK_THROWS_AS(assemble_multimodal_input(joint, {}, t), Error);
  }
}

TEST_CASE("hash_token_ids") {
  const auto ids = hash_token_ids("Cough and fever.", 100);
  CHECK(ids.size() == 3);
  for (auto id : ids) CHECK(id < 100);
  CHECK(hash_token_ids("COUGH", 100)[0] == ids[0]);
}

TEST_CASE("template generator") {
  const auto& vocab = default_region_vocabulary();
  TemplateGenerator gen;
  CHECK(gen.generate_for(vocab.ids({"mediastinum"})) == "The mediastinum is unremarkable.");
  CHECK(gen.generate_for({}).empty());

  SUBCASE("worked-example regions: one sentence per region group") {
    const auto regions = fixture::worked_report().regions();
    const auto text = gen.generate_for(regions);
    CHECK(split_sentences(text).size() == 4);  // mediastinum, lungs, clavicles, abdomen
  }
  SUBCASE("through an assembled sequence") {
    const auto p = ProjectionParams::identity(4);
    AnatomicalTokenSet cur(36, 2), pri(36, 2);
    const auto j = build_joint_representation(cur, pri, vocab.ids({"mediastinum"}), p);
    const auto seq = assemble_multimodal_input(j, {}, EmbedTables::zeros(4, 64, 4, 4));
    CHECK(generate_report(seq, gen) == "The mediastinum is unremarkable.");
  }
  SUBCASE("failures are wrapped") {
    struct Broken final : ReportGenerator {
      std::string name() const override { return "broken"; }
      std::string generate(const MultimodalSequence&) override { throw std::runtime_error("boom"); }
    } broken;
    try {
      generate_report(MultimodalSequence{}, broken, "r1");
      FAIL("expected GeneratorFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::GeneratorFailure);
      CHECK(std::string(e.what()).find("r1") != std::string::npos);
    }
  }
}
