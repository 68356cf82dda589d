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

#include "incoref/document.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "incoref/error.h"

namespace incoref {

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kParse: return "parse_error";
    case ErrorCategory::kInvalidArgument: return "invalid_argument";
    case ErrorCategory::kShape: return "shape_error";
    case ErrorCategory::kNumeric: return "numeric_error";
    case ErrorCategory::kIo: return "io_error";
    case ErrorCategory::kConfig: return "config_error";
    case ErrorCategory::kIncompatible: return "incompatible";
  }
  return "error";
}

int Document::token_count() const {
  int n = 0;
  for (const auto& s : sentences) n += static_cast<int>(s.size());
  return n;
}

std::vector<int> Document::sentence_starts() const {
  std::vector<int> starts;
  starts.reserve(sentences.size() + 1);
  int n = 0;
  for (const auto& s : sentences) {
    starts.push_back(n);
    n += static_cast<int>(s.size());
  }
  starts.push_back(n);
  return starts;
}

std::vector<std::string> Document::flat_tokens() const {
  std::vector<std::string> tokens;
  tokens.reserve(token_count());
  for (const auto& s : sentences) tokens.insert(tokens.end(), s.begin(), s.end());
  return tokens;
}

int Document::sentence_of(int token) const {
  auto starts = sentence_starts();
  auto it = std::upper_bound(starts.begin(), starts.end() - 1, token);
  return static_cast<int>(it - starts.begin()) - 1;
}

namespace {

std::string span_str(const Span& s) {
  std::ostringstream os;
  os << "(" << s.start << "," << s.end << ")";
  return os.str();
}

}  // namespace

void validate(const Document& doc) {
  const auto starts = doc.sentence_starts();
  const int n = starts.back();
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCategory::kInvalidArgument,
                "document " + doc.doc_id + ": " + what);
  };
  std::set<Span> seen;
  for (const auto& cluster : doc.clusters) {
    if (cluster.empty()) fail("empty cluster");
    for (const Span& s : cluster) {
      if (s.start < 0 || s.start > s.end || s.end >= n) {
        fail("span " + span_str(s) + " out of bounds");
      }
      auto it = std::upper_bound(starts.begin(), starts.end(), s.start);
      int sentence_end = *it;
      if (s.end >= sentence_end) {
        fail("span " + span_str(s) + " crosses a sentence boundary");
      }
      if (!seen.insert(s).second) fail("duplicate mention " + span_str(s));
    }
  }
}

void canonicalize(Clustering& clusters) {
  for (auto& c : clusters) std::sort(c.begin(), c.end());
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) {
              if (a.empty() || b.empty()) return a.size() < b.size();
              return a.front() < b.front();
            });
}

Clustering canonical(Clustering clusters) {
  canonicalize(clusters);
  return clusters;
}

bool structurally_equal(const Document& a, const Document& b) {
  return a.doc_id == b.doc_id && a.sentences == b.sentences &&
         canonical(a.clusters) == canonical(b.clusters);
}

std::vector<Span> all_mentions(const Clustering& clusters) {
  std::vector<Span> out;
  for (const auto& c : clusters) out.insert(out.end(), c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace incoref
