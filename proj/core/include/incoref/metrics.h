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

#ifndef INCOREF_METRICS_H_
#define INCOREF_METRICS_H_

#include <string>
#include <vector>

#include "incoref/document.h"

namespace incoref::metrics {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when a denominator was zero and the affected score was reported as 0.
  bool degenerate = false;
};

// Numerators and denominators for one metric. Summing counts over
// documents gives the corpus-level score the CoNLL scorer reports.
struct Counts {
  double recall_num = 0.0;
  double recall_den = 0.0;
  double precision_num = 0.0;
  double precision_den = 0.0;

  Counts& operator+=(const Counts& o);
  PRF prf() const;
};

PRF make_prf(double precision, double recall);

Counts muc_counts(const Clustering& key, const Clustering& response);
Counts b_cubed_counts(const Clustering& key, const Clustering& response);
Counts ceaf_phi4_counts(const Clustering& key, const Clustering& response);
Counts mention_counts(const std::vector<Span>& key,
                      const std::vector<Span>& response);
// Clusters match only when their mention sets are identical.
Counts exact_cluster_counts(const Clustering& key, const Clustering& response);

inline PRF muc(const Clustering& key, const Clustering& response) {
  return muc_counts(key, response).prf();
}
inline PRF b_cubed(const Clustering& key, const Clustering& response) {
  return b_cubed_counts(key, response).prf();
}
inline PRF ceaf_phi4(const Clustering& key, const Clustering& response) {
  return ceaf_phi4_counts(key, response).prf();
}
inline PRF mention_f1(const std::vector<Span>& key,
                      const std::vector<Span>& response) {
  return mention_counts(key, response).prf();
}

// phi4(K, R) = 2|K n R| / (|K| + |R|)
double phi4(const Cluster& key, const Cluster& response);

struct MetricReport {
  PRF muc;
  PRF b_cubed;
  PRF ceaf_phi4;
  PRF mention;
  // Exact-match realization: whole clusters must coincide.
  PRF exact_cluster;
  double avg_f1 = 0.0;
  std::vector<std::string> flags;
};

double avg_f1(const MetricReport& report);

// Accumulates counts over documents; report() gives corpus-level scores.
class Scorer {
 public:
  void add(const Clustering& key, const Clustering& response);
  MetricReport report() const;
  int documents() const { return documents_; }

 private:
  Counts muc_, b_cubed_, ceaf_, mention_, exact_;
  int documents_ = 0;
};

MetricReport score(const Clustering& key, const Clustering& response);
MetricReport score_corpus(const std::vector<Clustering>& keys,
                          const std::vector<Clustering>& responses);

std::string to_json(const MetricReport& report, int indent = 2);

}  // namespace incoref::metrics

#endif  // INCOREF_METRICS_H_
