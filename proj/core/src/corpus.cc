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

#include <algorithm>
#include <map>
#include <random>

#include "incoref/corpus.h"
#include "incoref/error.h"

namespace incoref {

std::vector<Segment> segment_document(const Document& doc, int max_len) {
  if (max_len < 1) {
    throw Error(ErrorCategory::kInvalidArgument, "max_len must be positive");
  }
  std::vector<Segment> segments;
  Segment current;
  int offset = 0;
  auto flush = [&]() {
    if (current.tokens.empty()) return;
    current.sentence_starts.push_back(current.size());
    segments.push_back(std::move(current));
    current = Segment{};
  };
  for (size_t i = 0; i < doc.sentences.size(); ++i) {
    const auto& sentence = doc.sentences[i];
    const int len = static_cast<int>(sentence.size());
    if (len > max_len) {
      throw Error(ErrorCategory::kInvalidArgument,
                  "document " + doc.doc_id + ": sentence " + std::to_string(i) +
                      " has " + std::to_string(len) +
                      " tokens, more than the segment limit " +
                      std::to_string(max_len));
    }
    if (len == 0) continue;
    if (current.size() + len > max_len) flush();
    if (current.tokens.empty()) {
      current.doc_id = doc.doc_id;
      current.sentence_range = {static_cast<int>(i), static_cast<int>(i)};
      current.token_offset = offset;
    }
    current.sentence_range.second = static_cast<int>(i);
    current.sentence_starts.push_back(current.size());
    current.tokens.insert(current.tokens.end(), sentence.begin(), sentence.end());
    offset += len;
  }
  flush();
  return segments;
}

Document strip_singletons(const Document& doc) {
  Document out = doc;
  std::erase_if(out.clusters, [](const Cluster& c) { return c.size() < 2; });
  return out;
}

std::vector<FoldSpec> make_folds(const std::vector<Document>& docs, int k,
                                 std::uint64_t seed) {
  const int n = static_cast<int>(docs.size());
  if (k < 2) throw Error(ErrorCategory::kInvalidArgument, "k must be >= 2");
  if (k > n) {
    throw Error(ErrorCategory::kInvalidArgument,
                "k=" + std::to_string(k) + " exceeds corpus size " +
                    std::to_string(n));
  }
  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.doc_id);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);

  // Slice i covers [bounds[i], bounds[i+1]); the first n % k slices get one
  // extra document.
  std::vector<int> bounds{0};
  for (int i = 0; i < k; ++i) bounds.push_back(bounds.back() + n / k + (i < n % k));
  auto slice = [&](int i) {
    return std::vector<std::string>(ids.begin() + bounds[i],
                                    ids.begin() + bounds[i + 1]);
  };
  std::vector<FoldSpec> folds;
  for (int i = 0; i < k; ++i) {
    FoldSpec f;
    f.fold_index = i;
    f.test_ids = slice(i);
    const int dev = (i + 1) % k;
    f.dev_ids = slice(dev);
    for (int j = 0; j < k; ++j) {
      if (j == i || j == dev) continue;
      auto s = slice(j);
      f.train_ids.insert(f.train_ids.end(), s.begin(), s.end());
    }
    folds.push_back(std::move(f));
  }
  return folds;
}

std::vector<Document> select_docs(const std::vector<Document>& docs,
                                  const std::vector<std::string>& ids) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : docs) by_id[d.doc_id] = &d;
  std::vector<Document> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error(ErrorCategory::kInvalidArgument, "unknown doc_id " + id);
    }
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace incoref
