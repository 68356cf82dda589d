// Copyright 2026 The incoref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "incoref/metrics.h"

#include <algorithm>
#include <map>
#include <set>

#include "incoref/hungarian.h"
#include "json.hpp"

namespace incoref::metrics {
namespace {

// Mention -> index of the cluster that contains it.
std::map<Span, int> cluster_index(const Clustering& clusters) {
  std::map<Span, int> index;
  for (size_t i = 0; i < clusters.size(); ++i) {
    for (const Span& s : clusters[i]) index[s] = static_cast<int>(i);
  }
  return index;
}

// Sum over `from` clusters of |C| - |partition of C by `by`|, and of |C| - 1.
std::pair<double, double> muc_side(const Clustering& from, const Clustering& by) {
  const auto index = cluster_index(by);
  double num = 0.0, den = 0.0;
  for (const auto& c : from) {
    if (c.empty()) continue;
    std::set<int> parts;
    int unmatched = 0;
    for (const Span& s : c) {
      auto it = index.find(s);
      if (it == index.end()) {
        ++unmatched;
      } else {
        parts.insert(it->second);
      }
    }
    const double size = static_cast<double>(c.size());
    num += size - static_cast<double>(parts.size() + unmatched);
    den += size - 1.0;
  }
  return {num, den};
}

std::pair<double, double> b_cubed_side(const Clustering& from,
                                       const Clustering& by) {
  const auto index = cluster_index(by);
  std::vector<std::set<Span>> by_sets;
  for (const auto& c : by) by_sets.emplace_back(c.begin(), c.end());
  double num = 0.0, den = 0.0;
  for (const auto& c : from) {
    for (const Span& s : c) {
      den += 1.0;
      auto it = index.find(s);
      if (it == index.end()) continue;
      const auto& other = by_sets[it->second];
      int overlap = 0;
      for (const Span& t : c) overlap += other.contains(t) ? 1 : 0;
      num += static_cast<double>(overlap) / static_cast<double>(c.size());
    }
  }
  return {num, den};
}

}  // namespace

Counts& Counts::operator+=(const Counts& o) {
  recall_num += o.recall_num;
  recall_den += o.recall_den;
  precision_num += o.precision_num;
  precision_den += o.precision_den;
  return *this;
}

PRF make_prf(double precision, double recall) {
  PRF out;
  out.precision = precision;
  out.recall = recall;
  out.f1 = precision + recall > 0.0
               ? 2.0 * precision * recall / (precision + recall)
               : 0.0;
  return out;
}

PRF Counts::prf() const {
  const double r = recall_den > 0.0 ? recall_num / recall_den : 0.0;
  const double p = precision_den > 0.0 ? precision_num / precision_den : 0.0;
  PRF out = make_prf(p, r);
  out.degenerate = recall_den <= 0.0 || precision_den <= 0.0;
  return out;
}

Counts muc_counts(const Clustering& key, const Clustering& response) {
  Counts c;
  std::tie(c.recall_num, c.recall_den) = muc_side(key, response);
  std::tie(c.precision_num, c.precision_den) = muc_side(response, key);
  return c;
}

Counts b_cubed_counts(const Clustering& key, const Clustering& response) {
  Counts c;
  std::tie(c.recall_num, c.recall_den) = b_cubed_side(key, response);
  std::tie(c.precision_num, c.precision_den) = b_cubed_side(response, key);
  return c;
}

double phi4(const Cluster& key, const Cluster& response) {
  if (key.empty() && response.empty()) return 0.0;
  std::set<Span> k(key.begin(), key.end());
  int overlap = 0;
  for (const Span& s : response) overlap += k.contains(s) ? 1 : 0;
  return 2.0 * overlap / static_cast<double>(key.size() + response.size());
}

Counts ceaf_phi4_counts(const Clustering& key, const Clustering& response) {
  Counts c;
  c.recall_den = static_cast<double>(key.size());
  c.precision_den = static_cast<double>(response.size());
  if (key.empty() || response.empty()) return c;
  std::vector<std::vector<double>> sim(key.size(),
                                       std::vector<double>(response.size()));
  for (size_t i = 0; i < key.size(); ++i) {
    for (size_t j = 0; j < response.size(); ++j) {
      sim[i][j] = phi4(key[i], response[j]);
    }
  }
  const double total = hungarian_max(sim).total;
  c.recall_num = total;
  c.precision_num = total;
  return c;
}

Counts mention_counts(const std::vector<Span>& key,
                      const std::vector<Span>& response) {
  std::set<Span> k(key.begin(), key.end());
  std::set<Span> r(response.begin(), response.end());
  int overlap = 0;
  for (const Span& s : r) overlap += k.contains(s) ? 1 : 0;
  Counts c;
  c.recall_num = c.precision_num = overlap;
  c.recall_den = static_cast<double>(k.size());
  c.precision_den = static_cast<double>(r.size());
  return c;
}

Counts exact_cluster_counts(const Clustering& key, const Clustering& response) {
  std::set<std::set<Span>> r;
  for (const auto& c : response) r.emplace(c.begin(), c.end());
  int matched = 0;
  for (const auto& c : key) matched += r.contains({c.begin(), c.end()}) ? 1 : 0;
  Counts out;
  out.recall_num = out.precision_num = matched;
  out.recall_den = static_cast<double>(key.size());
  out.precision_den = static_cast<double>(response.size());
  return out;
}

double avg_f1(const MetricReport& report) {
  return (report.muc.f1 + report.b_cubed.f1 + report.ceaf_phi4.f1) / 3.0;
}

void Scorer::add(const Clustering& key, const Clustering& response) {
  muc_ += muc_counts(key, response);
  b_cubed_ += b_cubed_counts(key, response);
  ceaf_ += ceaf_phi4_counts(key, response);
  mention_ += mention_counts(all_mentions(key), all_mentions(response));
  exact_ += exact_cluster_counts(key, response);
  ++documents_;
}

MetricReport Scorer::report() const {
  MetricReport r;
  r.muc = muc_.prf();
  r.b_cubed = b_cubed_.prf();
  r.ceaf_phi4 = ceaf_.prf();
  r.mention = mention_.prf();
  r.exact_cluster = exact_.prf();
  r.avg_f1 = avg_f1(r);
  if (r.muc.degenerate) r.flags.push_back("muc_degenerate");
  if (r.b_cubed.degenerate) r.flags.push_back("b_cubed_degenerate");
  if (r.ceaf_phi4.degenerate) r.flags.push_back("ceaf_phi4_degenerate");
  if (r.mention.degenerate) r.flags.push_back("mention_degenerate");
  return r;
}

MetricReport score(const Clustering& key, const Clustering& response) {
  Scorer s;
  s.add(key, response);
  return s.report();
}

MetricReport score_corpus(const std::vector<Clustering>& keys,
                          const std::vector<Clustering>& responses) {
  Scorer s;
  const size_t n = std::min(keys.size(), responses.size());
  for (size_t i = 0; i < n; ++i) s.add(keys[i], responses[i]);
  return s.report();
}

std::string to_json(const MetricReport& report, int indent) {
  auto prf = [](const PRF& p) {
    return nlohmann::json{{"precision", p.precision},
                          {"recall", p.recall},
                          {"f1", p.f1},
                          {"degenerate", p.degenerate}};
  };
  nlohmann::json j{{"muc", prf(report.muc)},
                   {"b_cubed", prf(report.b_cubed)},
                   {"ceaf_phi4", prf(report.ceaf_phi4)},
                   {"mention", prf(report.mention)},
                   {"exact_cluster", prf(report.exact_cluster)},
                   {"avg_f1", report.avg_f1},
                   {"flags", report.flags}};
  return j.dump(indent);
}

}  // namespace incoref::metrics
