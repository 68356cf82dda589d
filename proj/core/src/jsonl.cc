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

#include <sstream>
#include <string>

#include "incoref/corpus.h"
#include "incoref/error.h"
#include "json.hpp"

namespace incoref {

using nlohmann::json;

std::vector<Document> parse_jsonl(std::string_view text) {
  std::vector<Document> docs;
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      json record = json::parse(line);
      Document doc;
      doc.doc_id = record.at("doc_id").get<std::string>();
      doc.sentences =
          record.at("sentences").get<std::vector<std::vector<std::string>>>();
      for (const auto& cluster : record.at("clusters")) {
        Cluster c;
        for (const auto& span : cluster) {
          if (!span.is_array() || span.size() != 2) {
            throw Error(ErrorCategory::kParse, "span must be [start, end]");
          }
          c.push_back(Span{span[0].get<int>(), span[1].get<int>()});
        }
        doc.clusters.push_back(std::move(c));
      }
      if (record.contains("metadata")) {
        doc.metadata =
            record["metadata"].get<std::map<std::string, std::string>>();
      }
      validate(doc);
      docs.push_back(std::move(doc));
    } catch (const json::exception& e) {
      throw Error(ErrorCategory::kParse,
                  "jsonl line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCategory::kParse,
                  "jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

std::string write_jsonl(const std::vector<Document>& docs) {
  std::ostringstream os;
  for (const auto& doc : docs) {
    validate(doc);
    json clusters = json::array();
    for (const auto& c : doc.clusters) {
      json jc = json::array();
      for (const Span& s : c) jc.push_back({s.start, s.end});
      clusters.push_back(std::move(jc));
    }
    json record;
    record["doc_id"] = doc.doc_id;
    record["sentences"] = doc.sentences;
    record["clusters"] = std::move(clusters);
    record["metadata"] = doc.metadata;
    os << record.dump() << "\n";
  }
  return os.str();
}

}  // namespace incoref
