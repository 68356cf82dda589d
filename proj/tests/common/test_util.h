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

#ifndef INCOREF_TESTS_TEST_UTIL_H_
#define INCOREF_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "incoref/document.h"
#include "incoref/model.h"

namespace incoref::testing {

// A random partition of a random subset of `pool`, with at most
// `max_clusters` clusters. Mentions left out model missing mentions.
inline Clustering random_clustering(const std::vector<Span>& pool, int max_clusters,
                                    std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cluster_count(1, max_clusters);
  const int k = cluster_count(rng);
  std::uniform_int_distribution<int> slot(-1, k - 1);  // -1 drops the mention
  Clustering out(k);
  for (const Span& s : pool) {
    const int c = slot(rng);
    if (c >= 0) out[c].push_back(s);
  }
  std::erase_if(out, [](const Cluster& c) { return c.empty(); });
  return out;
}

// Mentions [i, i] for i in [0, n).
inline std::vector<Span> mention_pool(int n) {
  std::vector<Span> pool;
  for (int i = 0; i < n; ++i) pool.push_back({i, i});
  return pool;
}

// Uniform doubles in [lo, hi).
inline std::vector<double> random_scores(std::size_t n, double lo, double hi,
                                         std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(n);
  for (double& v : out) v = u(rng);
  return out;
}

// A model small enough for exhaustive finite differences.
inline ModelConfig small_model_config(std::uint64_t seed = 4) {
  ModelConfig c;
  c.encoder.num_layers = 2;
  c.encoder.hidden_dim = 8;
  c.encoder.hash_vocab_size = 64;
  c.encoder.max_position = 128;
  c.width_dim = 4;
  c.ffnn_hidden = 16;
  c.seed = seed;
  return c;
}

}  // namespace incoref::testing

#endif  // INCOREF_TESTS_TEST_UTIL_H_
