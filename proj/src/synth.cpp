#include "radctl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "radctl/anatomy_graph.hpp"
#include "radctl/error.hpp"
#include "radctl/random.hpp"

namespace radctl {

namespace {

using L = LabelClass;

TemplateSentence S(std::string text, std::vector<std::string> regions, std::map<std::string, LabelClass> labels = {},
                   bool abnormal = false) {
  return TemplateSentence{std::move(text), std::move(regions), std::move(labels), abnormal};
}

int label_rank(LabelClass c) {
  switch (c) {
    case L::Positive: return 3;
    case L::Uncertain: return 2;
    case L::Negative: return 1;
    case L::NoMention: return 0;
  }
  return 0;
}

std::string mapping_type(std::size_t regions, std::size_t sentences) {
  if (regions == 1) return sentences == 1 ? "one-to-one" : "one-to-many";
  return sentences == 1 ? "many-to-one" : "many-to-many";
}

template <class T>
const T& pick(SeededRng& rng, const std::vector<T>& items) {
  return items[rng.uniform_index(items.size())];
}

struct DrawnSentence {
  const TemplateSentence* tmpl;
  std::size_t group;  // index into the spec's groups, or npos for unlocalized
};

constexpr std::size_t kNoGroup = static_cast<std::size_t>(-1);

const TemplateSentence* pick_preferring(SeededRng& rng, const std::vector<const TemplateSentence*>& pool,
                                        double abnormal_rate) {
  std::vector<const TemplateSentence*> abnormal, normal;
  for (auto* t : pool) (t->abnormal ? abnormal : normal).push_back(t);
  if (abnormal.empty()) return pick(rng, normal);
  if (normal.empty()) return pick(rng, abnormal);
  return rng.bernoulli(abnormal_rate) ? pick(rng, abnormal) : pick(rng, normal);
}

View draw_view(SeededRng& rng, const SyntheticSpec& spec) {
  const double u = rng.uniform01();
  if (u < spec.ap_rate) return View::AP;
  if (u < spec.ap_rate + spec.pa_rate) return View::PA;
  if (u < spec.ap_rate + spec.pa_rate + spec.lateral_rate) return View::Lateral;
  return View::Other;
}

std::string id(const char* prefix, std::size_t a, std::size_t width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, static_cast<int>(width), a);
  return buf;
}

const std::vector<std::string> kIndications = {
    "Cough and fever.",
    "Shortness of breath.",
    "Chest pain, evaluate for pneumonia.",
    "Post-operative check.",
    "Line placement.",
    "Follow-up of pleural effusion.",
    "Evaluate for interval change.",
    "Dyspnea and hypoxia.",
};
const std::vector<std::string> kUnlocalized = {"No change is seen.", "Comparison is made to the prior study."};
const std::vector<std::string> kIndicationHeaders = {"INDICATION", "Indication", "indication", "HISTORY", "History"};
const std::vector<std::string> kFindingsHeaders = {"FINDINGS", "Findings", "findings", "FINDINGS "};
const std::vector<std::string> kImpressions = {"No acute cardiopulmonary process.", "Findings as above.",
                                               "Stable appearance of the chest."};

}  // namespace

std::vector<TemplateGroup> SyntheticSpec::default_template_groups() {
  std::vector<TemplateGroup> g;
  g.push_back({"mediastinum",
               {"mediastinum"},
               {S("The mediastinum is mildly enlarged.", {"mediastinum"}, {{"enlarged_cardiomediastinum", L::Positive}}, true),
                S("The mediastinum is within normal limits.", {"mediastinum"}, {{"enlarged_cardiomediastinum", L::Negative}}),
                S("Mediastinal contours are stable.", {"mediastinum"}, {{"enlarged_cardiomediastinum", L::Negative}})},
               {},
               1,
               1});
  g.push_back({"heart",
               {"cardiac silhouette"},
               {S("The heart is mildly enlarged.", {"cardiac silhouette"}, {{"cardiomegaly", L::Positive}}, true),
                S("Moderate cardiomegaly is again seen.", {"cardiac silhouette"}, {{"cardiomegaly", L::Positive}}, true),
                S("Heart size is normal.", {"cardiac silhouette"}, {{"cardiomegaly", L::Negative}}),
                S("The cardiac silhouette is unchanged.", {"cardiac silhouette"})},
               {},
               1,
               2});
  g.push_back({"lungs",
               {"left lung", "right lung"},
               {S("No pneumothorax or infective consolidation.", {"left lung", "right lung"},
                  {{"pneumothorax", L::Negative}, {"consolidation", L::Negative}, {"pneumonia", L::Negative}}),
                S("No suspicious nodules seen.", {"left lung", "right lung"}, {{"lung_lesion", L::Negative}}),
                S("Bilateral atelectasis, likely post-operative.", {"left lung", "right lung"},
                  {{"atelectasis", L::Uncertain}}, true),
                S("Mild pulmonary edema is present.", {"left lung", "right lung"}, {{"edema", L::Positive}}, true),
                S("The lungs are clear.", {"left lung", "right lung"})},
               {S("Blunting of right costophrenic angle noted.", {"right lung"}, {{"pleural_effusion", L::Positive}}, true),
                S("Patchy opacity in the left lower lobe.", {"left lung"}, {{"lung_opacity", L::Positive}}, true),
                S("Right upper lobe consolidation is concerning for pneumonia.", {"right lung"},
                  {{"consolidation", L::Uncertain}, {"pneumonia", L::Uncertain}}, true),
                S("The left lung is well expanded.", {"left lung"})},
               2,
               4});
  g.push_back({"clavicles",
               {"left clavicle", "right clavicle"},
               {S("Degenerative changes seen in both shoulders.", {"left clavicle", "right clavicle"}),
                S("No acute clavicular fracture.", {"left clavicle", "right clavicle"}, {{"fracture", L::Negative}})},
               {},
               1,
               1});
  g.push_back({"abdomen",
               {"abdomen"},
               {S("NG tube tip positioned correctly in stomach.", {"abdomen"}, {{"support_devices", L::Positive}}, true),
                S("No free air under diaphragm.", {"abdomen"}),
                S("The visualized upper abdomen is unremarkable.", {"abdomen"})},
               {},
               1,
               2});
  g.push_back({"pleura",
               {"left costophrenic angle", "right costophrenic angle"},
               {S("No pleural effusion.", {"left costophrenic angle", "right costophrenic angle"},
                  {{"pleural_effusion", L::Negative}}),
                S("Small bilateral pleural effusions.", {"left costophrenic angle", "right costophrenic angle"},
                  {{"pleural_effusion", L::Positive}}, true)},
               {S("Small left pleural effusion.", {"left costophrenic angle"}, {{"pleural_effusion", L::Positive}}, true),
                S("Trace right pleural effusion.", {"right costophrenic angle"}, {{"pleural_effusion", L::Positive}}, true)},
               1,
               2});
  g.push_back({"spine",
               {"spine"},
               {S("Degenerative changes of the thoracic spine.", {"spine"}),
                S("No acute fracture of the spine.", {"spine"}, {{"fracture", L::Negative}})},
               {},
               1,
               1});
  g.push_back({"airway",
               {"trachea", "carina"},
               {S("Endotracheal tube terminates 4 cm above the carina.", {"trachea", "carina"},
                  {{"support_devices", L::Positive}}, true),
                S("The trachea and carina are unremarkable.", {"trachea", "carina"})},
               {S("The trachea is midline.", {"trachea"})},
               1,
               2});
  g.push_back({"central line",
               {"svc", "cavoatrial junction"},
               {S("Right PICC line tip is at the cavoatrial junction.", {"svc", "cavoatrial junction"},
                  {{"support_devices", L::Positive}}, true)},
               {S("A central venous catheter terminates in the SVC.", {"svc"}, {{"support_devices", L::Positive}}, true)},
               1,
               2});
  g.push_back({"hila",
               {"left hilar structures", "right hilar structures"},
               {S("The hila are unremarkable.", {"left hilar structures", "right hilar structures"})},
               {S("The left hilum is prominent.", {"left hilar structures"})},
               1,
               2});
  g.push_back({"aorta",
               {"aortic arch", "descending aorta"},
               {S("The aorta is tortuous and calcified.", {"aortic arch", "descending aorta"})},
               {S("Calcification of the aortic arch.", {"aortic arch"})},
               1,
               2});
  g.push_back({"diaphragm",
               {"left hemidiaphragm", "right hemidiaphragm"},
               {S("Both hemidiaphragms are well defined.", {"left hemidiaphragm", "right hemidiaphragm"})},
               {S("The right hemidiaphragm is elevated.", {"right hemidiaphragm"})},
               1,
               2});
  return g;
}

void SyntheticSpec::validate(const RegionVocabulary& vocab) const {
  auto bad = [](const std::string& m) { fail(ErrorCode::InvalidSpec, m); };
  auto rate = [&](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) bad(std::string(name) + " must lie in [0, 1]");
  };
  rate(ap_rate, "ap_rate");
  rate(pa_rate, "pa_rate");
  rate(lateral_rate, "lateral_rate");
  rate(lateral_only_rate, "lateral_only_rate");
  rate(detection_rate, "detection_rate");
  rate(abnormal_rate, "abnormal_rate");
  rate(unlocalized_rate, "unlocalized_rate");
  rate(indication_rate, "indication_rate");
  if (ap_rate + pa_rate + lateral_rate > 1.0 + 1e-12) bad("view rates sum above 1");
  if (ap_rate + pa_rate <= 0.0) bad("view mix has no frontal views");
  if (patient_count == 0) bad("patient_count must be positive");
  if (min_studies == 0 || min_studies > max_studies) bad("invalid studies-per-patient range");
  if (min_scans == 0 || min_scans > max_scans) bad("invalid scans-per-study range");
  if (token_dim == 0) bad("token_dim must be positive");
  if (groups.empty()) bad("no template groups");
  if (min_groups == 0 || min_groups > max_groups || min_groups > groups.size())
    bad("invalid groups-per-report range");

  std::set<std::string> seen;
  for (const auto& g : groups) {
    if (g.anchors.empty()) bad("group '" + g.name + "' has no anchor sentence");
    if (g.min_sentences == 0 || g.min_sentences > g.max_sentences) bad("group '" + g.name + "' sentence range");
    const std::set<std::string> regions(g.regions.begin(), g.regions.end());
    for (const auto& r : g.regions) {
      if (!vocab.contains(r)) bad("group '" + g.name + "' uses unknown region '" + r + "'");
      if (!seen.insert(r).second) bad("region '" + r + "' appears in more than one group");
    }
    for (const auto& a : g.anchors)
      if (std::set<std::string>(a.regions.begin(), a.regions.end()) != regions)
        bad("anchor \"" + a.text + "\" must name every region of group '" + g.name + "'");
    for (const auto& s : g.satellites) {
      const std::set<std::string> sr(s.regions.begin(), s.regions.end());
      if (sr.empty() || sr.size() >= regions.size() ||
          !std::includes(regions.begin(), regions.end(), sr.begin(), sr.end()))
        bad("satellite \"" + s.text + "\" must name a strict non-empty subset of group '" + g.name + "'");
    }
    for (const auto* list : {&g.anchors, &g.satellites})
      for (const auto& s : *list)
        for (const auto& [finding, cls] : s.labels)
          if (!default_labeler_vocabulary().contains(finding)) bad("unknown finding label '" + finding + "'");
  }
}

SyntheticCorpus synth_corpus(const SyntheticSpec& spec, std::uint64_t seed, const RegionVocabulary& vocab) {
  spec.validate(vocab);
  SyntheticCorpus out;
  Json sidecar_reports = Json::array();
  Json sidecar_patients = Json::array();
  std::map<std::string, std::size_t> mapping_counts = {
      {"one-to-one", 0}, {"one-to-many", 0}, {"many-to-one", 0}, {"many-to-many", 0}};
  std::size_t sum_k = 0, initial = 0, follow_up = 0, excluded = 0;

  constexpr std::int64_t kDay = 86'400'000;
  const std::int64_t base = parse_timestamp("2150-01-01T00:00:00Z").millis;

  for (std::size_t p = 0; p < spec.patient_count; ++p) {
    const std::string patient_id = id("p", p + 1, 5);
    SeededRng rng(derive_seed(seed, {"synth-patient", patient_id}));
    const auto n_studies = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(spec.min_studies), static_cast<std::int64_t>(spec.max_studies)));
    std::int64_t t = base + rng.uniform_int(0, 3650) * kDay + rng.uniform_int(0, 86'399) * 1000;

    Json patient_studies = Json::array();
    std::optional<std::string> last_eligible;
    for (std::size_t s = 0; s < n_studies; ++s) {
      if (s > 0) t += rng.uniform_int(1, 400) * kDay + rng.uniform_int(0, 86'399) * 1000;
      StudyRecord study;
      study.patient_id = patient_id;
      study.study_id = id("s", (p + 1) * 100 + s + 1, 7);
      study.report_id = "r" + study.study_id.substr(1);
      study.timestamp = Timestamp{t};

      const bool lateral_only = s > 0 && rng.bernoulli(spec.lateral_only_rate);
      const auto n_scans = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(spec.min_scans), static_cast<std::int64_t>(spec.max_scans)));
      for (std::size_t k = 0; k < n_scans; ++k) {
        ScanRecord scan;
        scan.scan_id = study.study_id + "-" + std::to_string(k + 1);
        if (lateral_only) {
          scan.view = rng.bernoulli(0.85) ? View::Lateral : View::Other;
        } else if (k == 0) {
          scan.view = rng.uniform01() * (spec.ap_rate + spec.pa_rate) < spec.ap_rate ? View::AP : View::PA;
        } else {
          scan.view = draw_view(rng, spec);
        }
        if (is_frontal(scan.view)) {
          AnatomicalTokenSet tokens(vocab.size(), spec.token_dim);
          std::vector<double> v(spec.token_dim);
          for (std::size_t r = 0; r < vocab.size(); ++r) {
            if (!rng.bernoulli(spec.detection_rate)) continue;
            for (auto& x : v) x = std::round(rng.uniform(-1.0, 1.0) * 1e4) / 1e4;
            tokens.set(RegionId{static_cast<std::uint16_t>(r)}, v);
          }
          out.tokens.insert({study.study_id, scan.scan_id}, std::move(tokens));
          scan.tokens = out.tokens.find({study.study_id, scan.scan_id});
        }
        study.scans.push_back(std::move(scan));
      }

      const bool eligible = study.has_frontal();
      const bool is_follow_up = s > 0;
      Json study_json = {{"study_id", study.study_id},
                         {"report_id", study.report_id},
                         {"timestamp", format_timestamp(study.timestamp)},
                         {"eligible", eligible}};
      if (eligible) {
        study_json["is_initial"] = !last_eligible.has_value();
        study_json["prior_study_id"] = last_eligible ? Json(*last_eligible) : Json(nullptr);
        (last_eligible ? follow_up : initial) += 1;
        last_eligible = study.study_id;
      } else {
        ++excluded;
      }
      patient_studies.push_back(std::move(study_json));

      // Report content.
      SeededRng rep(derive_seed(seed, {"synth-report", study.study_id}));
      std::vector<std::size_t> order(spec.groups.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      const auto n_groups = static_cast<std::size_t>(
          rep.uniform_int(static_cast<std::int64_t>(spec.min_groups),
                          static_cast<std::int64_t>(std::min(spec.max_groups, spec.groups.size()))));
      for (std::size_t i = 0; i < n_groups; ++i) std::swap(order[i], order[i + rep.uniform_index(order.size() - i)]);

      std::vector<DrawnSentence> drawn;
      for (std::size_t gi = 0; gi < n_groups; ++gi) {
        const TemplateGroup& group = spec.groups[order[gi]];
        const auto n = static_cast<std::size_t>(rep.uniform_int(static_cast<std::int64_t>(group.min_sentences),
                                                                static_cast<std::int64_t>(group.max_sentences)));
        std::vector<const TemplateSentence*> anchors;
        for (const auto& a : group.anchors) anchors.push_back(&a);
        const TemplateSentence* first = pick_preferring(rep, anchors, spec.abnormal_rate);
        drawn.push_back({first, order[gi]});
        std::vector<const TemplateSentence*> pool;
        for (const auto& a : group.anchors)
          if (&a != first) pool.push_back(&a);
        for (const auto& sat : group.satellites) pool.push_back(&sat);
        for (std::size_t extra = 1; extra < n && !pool.empty(); ++extra) {
          const std::size_t j = rep.uniform_index(pool.size());
          drawn.push_back({pool[j], order[gi]});
          pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
        }
      }
      if (rep.bernoulli(0.5))
        for (std::size_t i = drawn.size(); i > 1; --i) std::swap(drawn[i - 1], drawn[rep.uniform_index(i)]);

      std::vector<std::string> unlocalized_texts;
      std::size_t unlocalized_at = drawn.size() + 1;
      if (is_follow_up && rep.bernoulli(spec.unlocalized_rate)) {
        unlocalized_texts.push_back(pick(rep, kUnlocalized));
        unlocalized_at = rep.uniform_index(drawn.size() + 1);
      }

      std::vector<std::string> sentences;
      std::vector<std::vector<std::string>> sentence_regions;
      std::map<std::size_t, std::vector<std::size_t>> group_sentences;
      std::map<std::string, LabelClass> labels;
      for (const auto& name : default_labeler_vocabulary().names()) labels[name] = L::NoMention;
      for (std::size_t i = 0; i <= drawn.size(); ++i) {
        if (i == unlocalized_at) {
          sentences.push_back(unlocalized_texts.front());
          sentence_regions.emplace_back();
        }
        if (i == drawn.size()) break;
        group_sentences[drawn[i].group].push_back(sentences.size());
        sentences.push_back(drawn[i].tmpl->text);
        sentence_regions.push_back(drawn[i].tmpl->regions);
        for (const auto& [finding, cls] : drawn[i].tmpl->labels)
          if (label_rank(cls) > label_rank(labels[finding])) labels[finding] = cls;
      }
      bool abnormal = false;
      for (const auto& [finding, cls] : labels)
        if (finding != "no_finding" && finding != "support_devices" && collapse(cls)) abnormal = true;
      labels["no_finding"] = abnormal ? L::NoMention : L::Positive;

      for (std::size_t i = 0; i < sentences.size(); ++i)
        out.annotations.push_back({study.report_id, i, sentences[i], sentence_regions[i]});

      std::vector<std::vector<std::size_t>> partition;
      for (auto& [g, idx] : group_sentences) partition.push_back(idx);
      std::sort(partition.begin(), partition.end());
      Json mapping = Json::array();
      Json partition_regions = Json::array();
      for (const auto& subset : partition) {
        std::size_t g = 0;
        for (const auto& [gi, idx] : group_sentences)
          if (idx == subset) g = gi;
        const auto type = mapping_type(spec.groups[g].regions.size(), subset.size());
        ++mapping_counts[type];
        mapping.push_back(type);
        std::vector<std::string> names = spec.groups[g].regions;
        std::sort(names.begin(), names.end(),
                  [&](const auto& a, const auto& b) { return vocab.find(a) < vocab.find(b); });
        partition_regions.push_back(names);
      }
      sum_k += partition.size();

      // Raw text with varied header casing and line wrapping.
      std::string findings_raw;
      for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i > 0) findings_raw += rep.bernoulli(0.3) ? "\n" : " ";
        findings_raw += sentences[i];
      }
      std::string indication;
      std::string raw = "EXAMINATION: CHEST RADIOGRAPH\n\n";
      if (rep.bernoulli(spec.indication_rate)) {
        indication = pick(rep, kIndications);
        raw += pick(rep, kIndicationHeaders) + ": " + indication + "\n\n";
      }
      raw += std::string("COMPARISON: ") + (last_eligible && is_follow_up ? "Prior radiograph." : "None.") + "\n\n";
      raw += pick(rep, kFindingsHeaders) + ":\n" + findings_raw + "\n\n";
      raw += "IMPRESSION: " + pick(rep, kImpressions) + "\n";
      out.reports.push_back({study.report_id, raw});

      std::string findings;
      for (const auto& s2 : sentences) findings += (findings.empty() ? "" : " ") + s2;
      Json label_json = Json::object();
      for (const auto& [finding, cls] : labels) label_json[finding] = std::string(to_string(cls));
      Json sentence_json = Json::array();
      for (std::size_t i = 0; i < sentences.size(); ++i)
        sentence_json.push_back({{"index", i}, {"text", sentences[i]}, {"regions", sentence_regions[i]}});
      sidecar_reports.push_back({{"report_id", study.report_id},
                                 {"patient_id", patient_id},
                                 {"study_id", study.study_id},
                                 {"sections", {{"findings", findings}, {"indication", indication}}},
                                 {"sentences", std::move(sentence_json)},
                                 {"partition", partition},
                                 {"partition_regions", std::move(partition_regions)},
                                 {"mapping_types", std::move(mapping)},
                                 {"k", partition.size()},
                                 {"labels", std::move(label_json)}});
      out.studies.push_back(std::move(study));
    }
    sidecar_patients.push_back({{"patient_id", patient_id}, {"studies", std::move(patient_studies)}});
  }

  out.sidecar = {{"seed", seed},
                 {"reports", std::move(sidecar_reports)},
                 {"patients", std::move(sidecar_patients)},
                 {"totals",
                  {{"patients", spec.patient_count},
                   {"studies", out.studies.size()},
                   {"reports", out.reports.size()},
                   {"sum_k", sum_k},
                   {"initial", initial},
                   {"follow_up", follow_up},
                   {"excluded_studies", excluded},
                   {"mapping_types", mapping_counts}}}};
  return out;
}

SyntheticFiles write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir,
                                      const RegionVocabulary& vocab) {
  std::filesystem::create_directories(dir);
  SyntheticFiles files{dir / "reports.jsonl", dir / "annotations.jsonl", dir / "metadata.csv", dir / "tokens.jsonl",
                       dir / "sidecar.json"};
  {
    JsonlWriter w(files.reports);
    for (const auto& r : corpus.reports) w.write({{"report_id", r.report_id}, {"text", r.text}});
  }
  {
    JsonlWriter w(files.annotations);
    for (const auto& a : corpus.annotations) w.write(annotation_to_json(a));
  }
  write_study_metadata(files.metadata, corpus.studies);
  {
    JsonlWriter w(files.tokens);
    for (const auto& [key, set] : corpus.tokens.entries()) w.write(tokens_to_json(key, *set, vocab));
  }
  write_json(files.sidecar, corpus.sidecar);
  return files;
}

}  // namespace radctl
