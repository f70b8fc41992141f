// Independent reference computations used by the unit and acceptance tests.
// Deliberately naive: adjacency matrices, literal loops, explicit counting.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "radctl/corpus.hpp"
#include "radctl/fusion.hpp"
#include "radctl/longitudinal.hpp"
#include "radctl/random.hpp"

namespace oracle {

using radctl::AnnotatedReport;
using radctl::RegionSet;

struct Component {
  std::vector<std::size_t> sentences;  // sentence_index values, ascending
  RegionSet regions;
  bool operator==(const Component&) const = default;
};

inline bool overlap(const RegionSet& a, const RegionSet& b) {
  for (auto r : a)
    if (b.count(r)) return true;
  return false;
}

inline void finish(std::vector<Component>& comps) {
  for (auto& c : comps) std::sort(c.sentences.begin(), c.sentences.end());
  std::sort(comps.begin(), comps.end(),
            [](const Component& a, const Component& b) { return a.sentences.front() < b.sentences.front(); });
}

// BFS over an explicit sentence adjacency matrix.
inline std::vector<Component> bfs_components(const AnnotatedReport& report) {
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < report.pairs.size(); ++i)
    if (!report.pairs[i].regions.empty()) nodes.push_back(i);
  const std::size_t n = nodes.size();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      adj[a][b] = a != b && overlap(report.pairs[nodes[a]].regions, report.pairs[nodes[b]].regions);

  std::vector<bool> seen(n, false);
  std::vector<Component> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    Component c;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      const auto& p = report.pairs[nodes[u]];
      c.sentences.push_back(p.sentence_index);
      c.regions.insert(p.regions.begin(), p.regions.end());
      for (std::size_t v = 0; v < n; ++v)
        if (adj[u][v] && !seen[v]) {
          seen[v] = true;
          q.push(v);
        }
    }
    out.push_back(std::move(c));
  }
  finish(out);
  return out;
}

// The nested fixed-point loop as usually written, over localized
// pairs. Read literally, the loop exits as soon as P_remaining empties and
// never records the component that emptied it; that last component is
// appended here.
inline std::vector<Component> fixed_point_components(const AnnotatedReport& report) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < report.pairs.size(); ++i)
    if (!report.pairs[i].regions.empty()) pending.push_back(i);
  std::vector<Component> out;
  if (pending.empty()) return out;

  auto regions_of = [&](const std::vector<std::size_t>& idx) {
    RegionSet r;
    for (auto i : idx) r.insert(report.pairs[i].regions.begin(), report.pairs[i].regions.end());
    return r;
  };

  std::vector<std::size_t> current{pending.front()};
  pending.erase(pending.begin());
  while (!pending.empty()) {
    while (overlap(regions_of(current), regions_of(pending))) {
      const RegionSet r = regions_of(current);
      for (auto i : pending)
        if (overlap(report.pairs[i].regions, r) &&
            std::find(current.begin(), current.end(), i) == current.end())
          current.push_back(i);
      std::vector<std::size_t> rest;
      for (auto i : pending)
        if (std::find(current.begin(), current.end(), i) == current.end()) rest.push_back(i);
      pending = rest;
    }
    Component c;
    for (auto i : current) c.sentences.push_back(report.pairs[i].sentence_index);
    c.regions = regions_of(current);
    out.push_back(std::move(c));
    if (pending.empty()) {
      current.clear();
      break;
    }
    current = {pending.front()};
    pending.erase(pending.begin());
  }
  if (!current.empty()) {
    Component c;
    for (auto i : current) c.sentences.push_back(report.pairs[i].sentence_index);
    c.regions = regions_of(current);
    out.push_back(std::move(c));
  }
  finish(out);
  return out;
}

// Pairing by exhaustive search: for every study with a frontal scan, look
// at every other study of the patient and keep the latest strictly earlier
// one that has a frontal scan. Scan choice: most present tokens; ties are
// broken by SeededRng(derive_seed(seed, {"scan", patient, study})) indexing
// the tied frontal scans in input order.
struct PairRow {
  std::string report_id;
  std::string current_study, current_scan;
  std::optional<std::string> prior_study, prior_scan;
  bool is_initial = true;
  bool operator==(const PairRow&) const = default;
};

inline std::string pick_scan(const radctl::StudyRecord& s, std::uint64_t seed) {
  std::size_t best = 0;
  bool any = false;
  for (const auto& sc : s.scans)
    if (radctl::is_frontal(sc.view)) {
      const std::size_t c = sc.tokens ? sc.tokens->present_count() : 0;
      if (!any || c > best) best = c;
      any = true;
    }
  std::vector<std::string> tied;
  for (const auto& sc : s.scans)
    if (radctl::is_frontal(sc.view) && (sc.tokens ? sc.tokens->present_count() : 0) == best) tied.push_back(sc.scan_id);
  if (tied.size() == 1) return tied.front();
  radctl::SeededRng rng(radctl::derive_seed(seed, {"scan", s.patient_id, s.study_id}));
  return tied[rng.uniform_index(tied.size())];
}

inline bool frontal(const radctl::StudyRecord& s) {
  for (const auto& sc : s.scans)
    if (radctl::is_frontal(sc.view)) return true;
  return false;
}

inline std::vector<PairRow> brute_force_pairs(const std::vector<radctl::StudyRecord>& studies, std::uint64_t seed) {
  std::vector<const radctl::StudyRecord*> eligible;
  for (const auto& s : studies)
    if (frontal(s)) eligible.push_back(&s);
  std::sort(eligible.begin(), eligible.end(),
            [](auto* a, auto* b) { return a->timestamp.millis < b->timestamp.millis; });
  std::vector<PairRow> rows;
  for (const auto* cur : eligible) {
    PairRow row{cur->report_id, cur->study_id, pick_scan(*cur, seed), std::nullopt, std::nullopt, true};
    const radctl::StudyRecord* prior = nullptr;
    for (const auto& cand : studies) {
      if (&cand == cur || !frontal(cand) || !(cand.timestamp.millis < cur->timestamp.millis)) continue;
      if (!prior || cand.timestamp.millis > prior->timestamp.millis) prior = &cand;
    }
    if (prior) {
      row.prior_study = prior->study_id;
      row.prior_scan = pick_scan(*prior, seed);
      row.is_initial = false;
    }
    rows.push_back(row);
  }
  return rows;
}

// y = W2 (gamma * (W1 x + b1 - mean) / sqrt(var + eps) + beta) + b2 with
// plain index loops.
inline std::vector<double> mlp(const std::vector<double>& x, const radctl::ProjectionParams& p) {
  const std::size_t in = static_cast<std::size_t>(p.fc1_weight.cols());
  const std::size_t hid = static_cast<std::size_t>(p.fc1_weight.rows());
  const std::size_t out = static_cast<std::size_t>(p.fc2_weight.rows());
  std::vector<double> h(hid, 0.0), y(out, 0.0);
  for (std::size_t i = 0; i < hid; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < in; ++j) acc += p.fc1_weight(i, j) * x[j];
    acc += p.fc1_bias(i);
    h[i] = p.bn_gamma(i) * (acc - p.bn_running_mean(i)) / std::sqrt(p.bn_running_var(i) + p.bn_epsilon) + p.bn_beta(i);
  }
  for (std::size_t i = 0; i < out; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < hid; ++j) acc += p.fc2_weight(i, j) * h[j];
    y[i] = acc + p.fc2_bias(i);
  }
  return y;
}

using Tokens = std::vector<std::string>;

inline std::map<Tokens, int> ngrams(const Tokens& t, std::size_t n) {
  std::map<Tokens, int> m;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++m[Tokens(t.begin() + i, t.begin() + i + n)];
  return m;
}

// Clipped precisions counted from scratch, geometric mean, brevity penalty.
inline double bleu(const Tokens& hyp, const Tokens& ref, int max_n) {
  if (hyp.empty()) return 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const auto h = ngrams(hyp, n), r = ngrams(ref, n);
    int match = 0, total = 0;
    for (const auto& [g, c] : h) {
      total += c;
      auto it = r.find(g);
      match += std::min(c, it == r.end() ? 0 : it->second);
    }
    if (match == 0) return 0.0;
    log_sum += std::log(static_cast<double>(match) / total);
  }
  const double c = static_cast<double>(hyp.size()), r = static_cast<double>(ref.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum / max_n);
}

inline std::size_t lcs(const Tokens& a, const Tokens& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return t[a.size()][b.size()];
}

inline double rouge_l(const Tokens& hyp, const Tokens& ref, double beta = 1.0) {
  const double l = static_cast<double>(lcs(hyp, ref));
  if (l == 0.0) return 0.0;
  const double p = l / hyp.size(), r = l / ref.size();
  return (1 + beta * beta) * p * r / (r + beta * beta * p);
}

// Score from alignment statistics, evaluated term by term.
inline double meteor_from_counts(double matches, double chunks, double hyp_len, double ref_len, double alpha = 0.9,
                                 double beta = 3.0, double gamma = 0.5) {
  if (matches == 0) return 0.0;
  const double p = matches / hyp_len;
  const double r = matches / ref_len;
  const double fmean = p * r / (alpha * p + (1 - alpha) * r);
  const double frag = matches > 1 ? (chunks - 1) / (matches - 1) : 0.0;
  const double penalty = gamma * std::pow(frag, beta);
  return fmean * (1 - penalty);
}

}  // namespace oracle
