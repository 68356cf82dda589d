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

#ifndef INCOREF_CORPUS_H_
#define INCOREF_CORPUS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "incoref/document.h"

namespace incoref {

// ---------------------------------------------------------------------------
// CoNLL-2012 coreference format.
//
// Token lines carry whitespace-separated columns. With four or more columns
// the word is column 3 (doc, part, index, word, ...); with two or three
// columns the word is column 0. The last column is always the coreference
// column. See docs/formats.md for the bracket grammar.
// ---------------------------------------------------------------------------

std::vector<Document> parse_conll(std::string_view text);
std::string write_conll(const std::vector<Document>& docs);

// One JSON object per line: {"doc_id", "sentences", "clusters", "metadata"}.
std::vector<Document> parse_jsonl(std::string_view text);
std::string write_jsonl(const std::vector<Document>& docs);

// A run of whole sentences whose token count is bounded by the segment size.
struct Segment {
  std::string doc_id;
  std::pair<int, int> sentence_range;  // first, last (inclusive)
  int token_offset = 0;
  std::vector<std::string> tokens;
  // Segment-local offsets of each sentence start, plus tokens.size().
  std::vector<int> sentence_starts;

  int size() const { return static_cast<int>(tokens.size()); }
};

// Greedy packing of whole sentences. Throws when one sentence alone exceeds
// max_len.
std::vector<Segment> segment_document(const Document& doc, int max_len);

Document strip_singletons(const Document& doc);

struct FoldSpec {
  int fold_index = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> dev_ids;
  std::vector<std::string> test_ids;
};

// One seeded shuffle, then k contiguous slices. Fold i tests on slice i,
// develops on slice (i + 1) mod k and trains on the rest.
std::vector<FoldSpec> make_folds(const std::vector<Document>& docs, int k,
                                 std::uint64_t seed);

// Selects documents by id, in the order of `ids`.
std::vector<Document> select_docs(const std::vector<Document>& docs,
                                  const std::vector<std::string>& ids);

}  // namespace incoref

#endif  // INCOREF_CORPUS_H_
