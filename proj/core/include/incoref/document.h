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

#ifndef INCOREF_DOCUMENT_H_
#define INCOREF_DOCUMENT_H_

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace incoref {

// Inclusive [start, end] over the flat token sequence of a document.
struct Span {
  int start = 0;
  int end = 0;

  int width() const { return end - start + 1; }
  auto operator<=>(const Span&) const = default;
};

using Cluster = std::vector<Span>;
using Clustering = std::vector<Cluster>;

struct Document {
  std::string doc_id;
  std::vector<std::vector<std::string>> sentences;
  Clustering clusters;
  std::map<std::string, std::string> metadata;

  int token_count() const;
  // Flat index of the first token of every sentence, plus a final entry equal
  // to token_count().
  std::vector<int> sentence_starts() const;
  std::vector<std::string> flat_tokens() const;
  // Index of the sentence containing a flat token index.
  int sentence_of(int token) const;

  bool operator==(const Document&) const = default;
};

// Throws Error(kInvalidArgument) naming the doc and the offending span when a
// Document invariant is broken: span bounds, sentence crossing, duplicates,
// empty clusters.
void validate(const Document& doc);

// Sorts mentions inside every cluster and clusters by their first mention.
void canonicalize(Clustering& clusters);
Clustering canonical(Clustering clusters);

// Equality on doc_id, sentences and clusters modulo ordering.
bool structurally_equal(const Document& a, const Document& b);

std::vector<Span> all_mentions(const Clustering& clusters);

}  // namespace incoref

#endif  // INCOREF_DOCUMENT_H_
