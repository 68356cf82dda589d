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

#ifndef INCOREF_SYNTH_H_
#define INCOREF_SYNTH_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "incoref/document.h"

namespace incoref {

// Closed inclusive integer range used by the generator.
struct IntRange {
  int lo = 0;
  int hi = 0;
};

// Annotation-scheme switches and size ranges for the synthetic corpus.
//
// The text of every document depends only on the size ranges and the seed;
// annotate_singletons and allowed_entity_types only change which entities are
// written into the gold clusters. Two configs that differ only in those
// switches therefore yield identical token sequences.
struct SchemeConfig {
  bool annotate_singletons = true;
  // Entity types are PER, ORG, LOC and OBJ. Unset means all are annotated.
  std::optional<std::set<std::string>> allowed_entity_types;
  int vocab_size = 200;  // filler words
  int name_pool_size = 400;
  int num_docs = 20;
  IntRange sentences_per_doc{4, 8};
  IntRange sentence_length{5, 12};
  IntRange entities_per_doc{3, 6};
  IntRange mentions_per_entity{1, 4};
  std::uint64_t seed = 1;
  std::string doc_prefix = "synth";
};

void validate(const SchemeConfig& config);

std::vector<Document> synth_corpus(const SchemeConfig& config);

// Fixed two-sentence document with three two-mention entities, used by the
// gradient checks.
Document tiny_document();

// Entity type tags in generator order.
const std::vector<std::string>& entity_types();

}  // namespace incoref

#endif  // INCOREF_SYNTH_H_
