#include "radctl/anatomy_graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "radctl/disjoint_set.hpp"
#include "radctl/error.hpp"
#include "radctl/random.hpp"

namespace radctl {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

bool intersects(const RegionSet& a, const RegionSet& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      return true;
    }
  }
  return false;
}

std::string describe(const RegionSet& regions) {
  std::string out = "{";
  for (RegionId r : regions) {
    if (out.size() > 1) out += ",";
    out += std::to_string(r.value);
  }
  return out + "}";
}

}  // namespace

ValidPartition find_valid_subsets(const AnnotatedReport& report) {
  ValidPartition out;
  out.report_id = report.report_id;
  const auto& pairs = report.pairs;

  DisjointSet components(pairs.size());
  std::map<RegionId, std::size_t> first_sentence;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].localized()) {
      out.unlocalized.push_back({pairs[i].sentence_index, pairs[i].text});
      continue;
    }
    for (RegionId r : pairs[i].regions) {
      auto [it, inserted] = first_sentence.emplace(r, i);
      if (!inserted) components.unite(it->second, i);
    }
  }

  // Pairs are ordered by sentence_index, so visiting them in order numbers
  // components by their first sentence.
  std::map<std::size_t, std::size_t> subset_of_root;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].localized()) continue;
    const std::size_t root = components.find(i);
    auto [it, inserted] = subset_of_root.emplace(root, out.subsets.size());
    if (inserted) out.subsets.emplace_back();
    SubsetEntry& subset = out.subsets[it->second];
    subset.pair_indices.push_back(pairs[i].sentence_index);
    subset.sentences.push_back(pairs[i].text);
    subset.regions.insert(pairs[i].regions.begin(), pairs[i].regions.end());
  }
  for (auto& subset : out.subsets) subset.target_text = join(subset.sentences);
  return out;
}

CheckResult validate_partition(const AnnotatedReport& report, const ValidPartition& partition) {
  CheckResult result;
  std::map<std::size_t, const SentenceAnatomyPair*> by_index;
  for (const auto& p : report.pairs) by_index.emplace(p.sentence_index, &p);

  std::map<std::size_t, std::size_t> owner;
  for (std::size_t k = 0; k < partition.subsets.size(); ++k) {
    const SubsetEntry& subset = partition.subsets[k];
    RegionSet covered;
    for (std::size_t idx : subset.pair_indices) {
      auto it = by_index.find(idx);
      if (it == by_index.end()) {
        result.violation("subset " + std::to_string(k) + " names unknown sentence " + std::to_string(idx));
        continue;
      }
      if (!it->second->localized())
        result.violation("subset " + std::to_string(k) + " contains unlocalized sentence " + std::to_string(idx));
      if (auto [o, inserted] = owner.emplace(idx, k); !inserted)
        result.violation("sentence " + std::to_string(idx) + " appears in subsets " + std::to_string(o->second) +
                         " and " + std::to_string(k));
      covered.insert(it->second->regions.begin(), it->second->regions.end());
    }
    if (covered != subset.regions)
      result.violation("C2 violated: subset " + std::to_string(k) + " regions " + describe(subset.regions) +
                       " differ from its sentences' regions " + describe(covered));
    for (const auto& p : report.pairs) {
      if (!p.localized()) continue;
      const bool inside =
          std::find(subset.pair_indices.begin(), subset.pair_indices.end(), p.sentence_index) !=
          subset.pair_indices.end();
      if (!inside && intersects(p.regions, subset.regions))
        result.violation("C1 violated: sentence " + std::to_string(p.sentence_index) + " (\"" + p.text +
                         "\") shares regions with subset " + std::to_string(k) + " but is outside it");
    }
  }
  for (const auto& p : report.pairs)
    if (p.localized() && !owner.contains(p.sentence_index))
      result.violation("localized sentence " + std::to_string(p.sentence_index) + " is not covered");
  return result;
}

std::uint64_t dropout_seed(std::uint64_t global_seed, const std::string& report_id, std::size_t sample_index) {
  const std::string n = std::to_string(sample_index);
  return derive_seed(global_seed, {"dropout", report_id, n});
}

DropoutSample sample_dropout(const ValidPartition& partition, std::uint64_t seed, const SamplerOptions& options) {
  const std::size_t k = partition.subsets.size();
  if (k == 0) fail(ErrorCode::EmptyPartition, "report '" + partition.report_id + "' has no localized sentences");

  SeededRng rng(seed);
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::size_t m = k;
  if (!(options.full_report_probability && rng.bernoulli(*options.full_report_probability))) {
    m = 1 + static_cast<std::size_t>(rng.uniform_index(k));
    // Partial Fisher-Yates: the first m slots become a uniform m-subset.
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(k - i));
      std::swap(order[i], order[j]);
    }
  }

  DropoutSample sample;
  sample.report_id = partition.report_id;
  sample.selected_subsets.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(sample.selected_subsets.begin(), sample.selected_subsets.end());
  sample.full_report = m == k;

  std::vector<std::pair<std::size_t, const std::string*>> sentences;
  for (std::size_t s : sample.selected_subsets) {
    const SubsetEntry& subset = partition.subsets[s];
    sample.target_regions.insert(subset.regions.begin(), subset.regions.end());
    for (std::size_t i = 0; i < subset.pair_indices.size(); ++i)
      sentences.emplace_back(subset.pair_indices[i], &subset.sentences[i]);
  }
  if (sample.full_report)
    for (const auto& u : partition.unlocalized) sentences.emplace_back(u.sentence_index, &u.text);
  std::sort(sentences.begin(), sentences.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  for (const auto& [idx, text] : sentences) {
    sample.target_sentences.push_back(idx);
    if (!sample.target_text.empty()) sample.target_text.push_back(' ');
    sample.target_text += *text;
  }

  sample.input_mask.assign(options.region_count, false);
  for (RegionId r : sample.target_regions) {
    if (r.value >= options.region_count)
      fail(ErrorCode::UnknownRegion, "region index " + std::to_string(r.value) + " outside the vocabulary");
    sample.input_mask[r.value] = true;
  }
  return sample;
}

CheckResult check_dropout_sample(const AnnotatedReport& report, const DropoutSample& sample) {
  CheckResult result;
  std::map<std::size_t, const SentenceAnatomyPair*> by_index;
  for (const auto& p : report.pairs) by_index.emplace(p.sentence_index, &p);

  std::vector<std::size_t> localized_target;
  RegionSet target_union;
  std::vector<std::string> texts;
  bool has_unlocalized = false;
  for (std::size_t idx : sample.target_sentences) {
    auto it = by_index.find(idx);
    if (it == by_index.end()) {
      result.violation("target names unknown sentence " + std::to_string(idx));
      continue;
    }
    texts.push_back(it->second->text);
    if (it->second->localized()) {
      localized_target.push_back(idx);
      target_union.insert(it->second->regions.begin(), it->second->regions.end());
    } else {
      has_unlocalized = true;
    }
  }
  if (!std::is_sorted(sample.target_sentences.begin(), sample.target_sentences.end()))
    result.violation("target sentences are not in report order");

  std::vector<std::size_t> required;
  for (const auto& p : report.pairs)
    if (intersects(p.regions, sample.target_regions)) required.push_back(p.sentence_index);
  if (required != localized_target)
    result.violation("C1 violated: target sentences differ from the sentences describing A_target " +
                     describe(sample.target_regions));
  if (target_union != sample.target_regions)
    result.violation("C2 violated: A_target " + describe(sample.target_regions) +
                     " differs from the regions of the target sentences " + describe(target_union));

  const bool all_localized = localized_target.size() == report.pairs.size() - report.unlocalized_count();
  if (has_unlocalized && !(sample.full_report && all_localized))
    result.violation("unlocalized sentence included in a partial target");
  if (sample.full_report && report.unlocalized_count() > 0 && !has_unlocalized)
    result.violation("full-report target omits unlocalized sentences");

  if (join(texts) != sample.target_text) result.violation("target_text is not the in-order sentence join");
  for (std::size_t r = 0; r < sample.input_mask.size(); ++r)
    if (sample.input_mask[r] != sample.target_regions.contains(RegionId{static_cast<std::uint16_t>(r)})) {
      result.violation("input mask disagrees with A_target at region " + std::to_string(r));
      break;
    }
  return result;
}

std::vector<PartialEvalInstance> build_partial_eval_set(std::span<const AnnotatedReport> reports) {
  std::vector<PartialEvalInstance> out;
  for (const auto& report : reports) {
    ValidPartition partition = find_valid_subsets(report);
    for (std::size_t k = 0; k < partition.subsets.size(); ++k) {
      auto& subset = partition.subsets[k];
      out.push_back({report.report_id, k, std::move(subset.regions), std::move(subset.target_text)});
    }
  }
  return out;
}

}  // namespace radctl
