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

#ifndef INCOREF_TESTS_METRIC_ORACLES_H_
#define INCOREF_TESTS_METRIC_ORACLES_H_

// Deliberately naive reference scorers. They share no code with the library
// and favor obviousness over speed.

#include <algorithm>
#include <numeric>
#include <vector>

#include "incoref/document.h"

namespace incoref::testing {

struct OraclePR {
  double precision = 0.0;
  double recall = 0.0;
};

inline bool has(const Cluster& c, const Span& s) {
  return std::find(c.begin(), c.end(), s) != c.end();
}

inline const Cluster* find_cluster(const Clustering& cs, const Span& s) {
  for (const Cluster& c : cs) {
    if (has(c, s)) return &c;
  }
  return nullptr;
}

// Connected components of `c` when two mentions are joined iff `by` puts
// them in the same cluster. Mentions unknown to `by` stay isolated.
inline int partition_count(const Cluster& c, const Clustering& by) {
  const int n = static_cast<int>(c.size());
  std::vector<int> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Cluster* a = find_cluster(by, c[i]);
        if (a == nullptr || !has(*a, c[j])) continue;
        const int m = std::min(comp[i], comp[j]);
        if (comp[i] != m || comp[j] != m) {
          comp[i] = comp[j] = m;
          changed = true;
        }
      }
    }
  }
  std::sort(comp.begin(), comp.end());
  return static_cast<int>(std::unique(comp.begin(), comp.end()) - comp.begin());
}

inline double muc_side(const Clustering& from, const Clustering& by) {
  double num = 0.0, den = 0.0;
  for (const Cluster& c : from) {
    num += static_cast<double>(c.size()) - partition_count(c, by);
    den += static_cast<double>(c.size()) - 1.0;
  }
  return den > 0.0 ? num / den : 0.0;
}

inline OraclePR muc_oracle(const Clustering& key, const Clustering& response) {
  return {muc_side(response, key), muc_side(key, response)};
}

inline double b_cubed_side(const Clustering& from, const Clustering& by) {
  double num = 0.0, den = 0.0;
  for (const Cluster& c : from) {
    for (const Span& m : c) {
      den += 1.0;
      const Cluster* other = find_cluster(by, m);
      if (other == nullptr) continue;
      int both = 0;
      for (const Span& s : c) both += has(*other, s) ? 1 : 0;
      num += static_cast<double>(both) / static_cast<double>(c.size());
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

inline OraclePR b_cubed_oracle(const Clustering& key, const Clustering& response) {
  return {b_cubed_side(response, key), b_cubed_side(key, response)};
}

inline double phi4_oracle(const Cluster& k, const Cluster& r) {
  int both = 0;
  for (const Span& s : k) both += has(r, s) ? 1 : 0;
  return 2.0 * both / static_cast<double>(k.size() + r.size());
}

// Best total over every permutation of a square matrix padded with zeros.
inline double brute_force_assignment(const std::vector<std::vector<double>>& m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows == 0 ? 0 : m[0].size();
  const std::size_t n = std::max(rows, cols);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = 0.0;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (perm[i] < cols) total += m[i][perm[i]];
    }
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline OraclePR ceaf_oracle(const Clustering& key, const Clustering& response) {
  if (key.empty() || response.empty()) return {};
  std::vector<std::vector<double>> sim(key.size(), std::vector<double>(response.size()));
  for (std::size_t i = 0; i < key.size(); ++i) {
    for (std::size_t j = 0; j < response.size(); ++j) {
      sim[i][j] = phi4_oracle(key[i], response[j]);
    }
  }
  const double total = brute_force_assignment(sim);
  return {total / static_cast<double>(response.size()),
          total / static_cast<double>(key.size())};
}

}  // namespace incoref::testing

#endif  // INCOREF_TESTS_METRIC_ORACLES_H_
