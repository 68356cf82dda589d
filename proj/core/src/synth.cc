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

#include "incoref/synth.h"

#include <algorithm>
#include <cstdio>
#include <random>

#include "incoref/error.h"

namespace incoref {
namespace {

constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n",
                                   "p", "r", "s", "t", "v", "z"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u"};

// Deterministic pseudo-word for an index; `syllables` fixes the length so
// names (3 syllables) and filler (2 syllables) never collide.
std::string pseudo_word(int index, int syllables, bool capitalize) {
  std::string w;
  for (int s = 0; s < syllables; ++s) {
    w += kOnsets[index % 14];
    index /= 14;
    w += kVowels[index % 5];
    index /= 5;
  }
  if (capitalize) w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

struct TypeForms {
  std::vector<std::string> prefixes;
  std::vector<std::string> suffixes;
};

const TypeForms& forms_for(int type) {
  static const TypeForms kForms[] = {
      {{"Mr", "Ms", "Dr"}, {}},
      {{}, {"Corp", "Inc", "Group"}},
      {{}, {"City", "River", "Valley"}},
      {{}, {"Device", "Engine", "Tool"}},
  };
  return kForms[type];
}

int draw(std::mt19937_64& rng, IntRange r) {
  return std::uniform_int_distribution<int>(r.lo, r.hi)(rng);
}

struct PlacedMention {
  int entity;
  std::vector<std::string> tokens;
};

}  // namespace

const std::vector<std::string>& entity_types() {
  static const std::vector<std::string> kTypes{"PER", "ORG", "LOC", "OBJ"};
  return kTypes;
}

void validate(const SchemeConfig& c) {
  auto check = [](IntRange r, int min, const char* name) {
    if (r.lo < min || r.hi < r.lo) {
      throw Error(ErrorCategory::kConfig,
                  std::string("synthetic range ") + name + " is empty or below " +
                      std::to_string(min));
    }
  };
  check(c.sentences_per_doc, 1, "sentences_per_doc");
  check(c.sentence_length, 1, "sentence_length");
  check(c.entities_per_doc, 0, "entities_per_doc");
  check(c.mentions_per_entity, 1, "mentions_per_entity");
  if (c.vocab_size < 1 || c.num_docs < 0) {
    throw Error(ErrorCategory::kConfig, "vocab_size and num_docs must be positive");
  }
  if (c.name_pool_size < c.entities_per_doc.hi) {
    throw Error(ErrorCategory::kConfig,
                "name_pool_size must cover entities_per_doc.hi");
  }
  if (c.allowed_entity_types) {
    for (const auto& t : *c.allowed_entity_types) {
      if (std::find(entity_types().begin(), entity_types().end(), t) ==
          entity_types().end()) {
        throw Error(ErrorCategory::kConfig, "unknown entity type " + t);
      }
    }
  }
}

std::vector<Document> synth_corpus(const SchemeConfig& config) {
  validate(config);
  std::vector<Document> docs;
  docs.reserve(config.num_docs);
  for (int d = 0; d < config.num_docs; ++d) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(d), 0x5eedu};
    std::mt19937_64 rng(seq);

    const int num_entities = draw(rng, config.entities_per_doc);
    const int num_sentences = draw(rng, config.sentences_per_doc);

    std::vector<int> names(config.name_pool_size);
    for (int i = 0; i < config.name_pool_size; ++i) names[i] = i;
    std::shuffle(names.begin(), names.end(), rng);

    std::vector<int> types(num_entities);
    std::vector<int> counts(num_entities);
    std::vector<std::vector<PlacedMention>> per_sentence(num_sentences);
    for (int e = 0; e < num_entities; ++e) {
      // Each name belongs to one type, so type lexicons are stable.
      types[e] = names[e] % 4;
      counts[e] = draw(rng, config.mentions_per_entity);
      const std::string name = pseudo_word(names[e], 3, true);
      const TypeForms& forms = forms_for(types[e]);
      for (int m = 0; m < counts[e]; ++m) {
        PlacedMention pm{e, {}};
        const bool full = std::bernoulli_distribution(0.5)(rng);
        if (full && !forms.prefixes.empty()) {
          pm.tokens.push_back(forms.prefixes[rng() % forms.prefixes.size()]);
        }
        pm.tokens.push_back(name);
        if (full && !forms.suffixes.empty()) {
          pm.tokens.push_back(forms.suffixes[rng() % forms.suffixes.size()]);
        }
        int s = std::uniform_int_distribution<int>(0, num_sentences - 1)(rng);
        per_sentence[s].push_back(std::move(pm));
      }
    }

    Document doc;
    char id[64];
    std::snprintf(id, sizeof(id), "%s_%04d", config.doc_prefix.c_str(), d);
    doc.doc_id = id;
    std::vector<std::vector<Span>> entity_spans(num_entities);
    int offset = 0;
    for (int s = 0; s < num_sentences; ++s) {
      auto& mentions = per_sentence[s];
      std::shuffle(mentions.begin(), mentions.end(), rng);
      const int fillers = std::max(draw(rng, config.sentence_length),
                                   static_cast<int>(mentions.size()) - 1);
      // Mentions go into distinct gaps between filler words, so two mentions
      // are never adjacent.
      std::vector<int> gaps(fillers + 1);
      for (int g = 0; g <= fillers; ++g) gaps[g] = g;
      std::shuffle(gaps.begin(), gaps.end(), rng);
      gaps.resize(mentions.size());
      std::vector<int> order(mentions.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return gaps[a] < gaps[b]; });

      std::vector<std::string> sentence;
      size_t next = 0;
      for (int g = 0; g <= fillers; ++g) {
        while (next < order.size() && gaps[order[next]] == g) {
          const PlacedMention& pm = mentions[order[next]];
          const int start = offset + static_cast<int>(sentence.size());
          sentence.insert(sentence.end(), pm.tokens.begin(), pm.tokens.end());
          entity_spans[pm.entity].push_back(
              Span{start, offset + static_cast<int>(sentence.size()) - 1});
          ++next;
        }
        if (g < fillers) {
          int w = std::uniform_int_distribution<int>(0, config.vocab_size - 1)(rng);
          sentence.push_back(pseudo_word(w, 2, false));
        }
      }
      offset += static_cast<int>(sentence.size());
      doc.sentences.push_back(std::move(sentence));
    }

    for (int e = 0; e < num_entities; ++e) {
      auto& spans = entity_spans[e];
      if (spans.empty()) continue;
      if (!config.annotate_singletons && spans.size() < 2) continue;
      if (config.allowed_entity_types &&
          !config.allowed_entity_types->contains(entity_types()[types[e]])) {
        continue;
      }
      doc.clusters.push_back(spans);
    }
    canonicalize(doc.clusters);
    docs.push_back(std::move(doc));
  }
  return docs;
}

Document tiny_document() {
  Document doc;
  doc.doc_id = "tiny";
  doc.sentences = {{"Anna", "Berg", "met", "the", "old", "Doctor", "in", "Oslo", "."},
                   {"She", "thanked", "him", "there", "."}};
  doc.clusters = {{{0, 1}, {9, 9}}, {{3, 5}, {11, 11}}, {{7, 7}, {12, 12}}};
  canonicalize(doc.clusters);
  return doc;
}

}  // namespace incoref
