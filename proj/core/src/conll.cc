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
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "incoref/corpus.h"
#include "incoref/error.h"

namespace incoref {
namespace {

constexpr std::string_view kBegin = "#begin document";
constexpr std::string_view kEnd = "#end document";

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_id(std::string_view s, int* id) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *id);
  return ec == std::errc() && ptr == s.data() + s.size() && *id >= 0;
}

struct OpenMention {
  int token;
  int sentence;
  int line;
};

class ConllReader {
 public:
  std::vector<Document> read(std::string_view text) {
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no;
      handle_line(line, line_no);
      if (nl == text.size()) break;
      pos = nl + 1;
    }
    if (in_doc_) fail(line_no, "missing #end document");
    return std::move(docs_);
  }

 private:
  [[noreturn]] void fail(int line, const std::string& what) const {
    std::ostringstream os;
    os << "document " << (in_doc_ ? doc_.doc_id : std::string("<none>"))
       << ", line " << line << ": " << what;
    throw Error(ErrorCategory::kParse, os.str());
  }

  void handle_line(std::string_view line, int line_no) {
    if (line.starts_with(kBegin)) {
      if (in_doc_) fail(line_no, "nested #begin document");
      begin_doc(line, line_no);
      return;
    }
    if (line.starts_with(kEnd)) {
      if (!in_doc_) fail(line_no, "#end document without #begin");
      end_doc(line_no);
      return;
    }
    if (!line.empty() && line[0] == '#') return;
    auto cols = split_ws(line);
    if (cols.empty()) {
      close_sentence();
      return;
    }
    if (!in_doc_) fail(line_no, "token line outside a document");
    if (cols.size() < 2) fail(line_no, "token line needs at least 2 columns");
    std::string_view word = cols.size() >= 4 ? cols[3] : cols[0];
    int token = token_count_ + static_cast<int>(sentence_.size());
    sentence_.emplace_back(word);
    read_coref(cols.back(), token, line_no);
  }

  void begin_doc(std::string_view line, int line_no) {
    in_doc_ = true;
    doc_ = Document{};
    std::string_view rest = line.substr(kBegin.size());
    auto lp = rest.find('(');
    auto rp = rest.rfind(')');
    if (lp != std::string_view::npos && rp != std::string_view::npos &&
        rp > lp) {
      doc_.doc_id = std::string(rest.substr(lp + 1, rp - lp - 1));
      auto part_pos = rest.find("part", rp);
      if (part_pos != std::string_view::npos) {
        auto part = split_ws(rest.substr(part_pos + 4));
        if (!part.empty() && part[0] != "000") {
          doc_.metadata["part"] = std::string(part[0]);
        }
      }
    } else {
      auto cols = split_ws(rest);
      if (cols.empty()) fail(line_no, "#begin document without an id");
      doc_.doc_id = std::string(cols[0]);
    }
    open_.clear();
    spans_.clear();
    token_count_ = 0;
    sentence_.clear();
  }

  void read_coref(std::string_view cell, int token, int line_no) {
    if (cell == "-") return;
    const int sentence = static_cast<int>(doc_.sentences.size());
    size_t pos = 0;
    while (pos <= cell.size()) {
      size_t bar = cell.find('|', pos);
      if (bar == std::string_view::npos) bar = cell.size();
      std::string_view part = cell.substr(pos, bar - pos);
      int id = 0;
      bool opens = part.starts_with("(");
      bool closes = part.ends_with(")");
      std::string_view digits = part;
      if (opens) digits.remove_prefix(1);
      if (closes && !digits.empty()) digits.remove_suffix(1);
      if ((!opens && !closes) || !parse_id(digits, &id)) {
        fail(line_no, "malformed coreference marker '" + std::string(part) +
                          "'");
      }
      if (opens && closes) {
        add_span(id, Span{token, token}, line_no);
      } else if (opens) {
        open_[id].push_back(OpenMention{token, sentence, line_no});
      } else {
        auto& stack = open_[id];
        if (stack.empty()) {
          fail(line_no, "unbalanced bracket: '" + std::string(part) +
                            "' closes a mention that was never opened");
        }
        OpenMention m = stack.back();
        stack.pop_back();
        if (m.sentence != sentence) {
          fail(line_no, "mention of cluster " + std::to_string(id) +
                            " opened on line " + std::to_string(m.line) +
                            " crosses a sentence boundary");
        }
        add_span(id, Span{m.token, token}, line_no);
      }
      if (bar == cell.size()) break;
      pos = bar + 1;
    }
  }

  void add_span(int id, Span span, int line_no) {
    auto [it, inserted] = spans_.emplace(span, id);
    if (!inserted) {
      fail(line_no, "duplicate mention (" + std::to_string(span.start) + "," +
                        std::to_string(span.end) + ") in clusters " +
                        std::to_string(it->second) + " and " +
                        std::to_string(id));
    }
  }

  void close_sentence() {
    if (!in_doc_ || sentence_.empty()) return;
    token_count_ += static_cast<int>(sentence_.size());
    doc_.sentences.push_back(std::move(sentence_));
    sentence_.clear();
  }

  void end_doc(int line_no) {
    close_sentence();
    for (const auto& [id, stack] : open_) {
      if (!stack.empty()) {
        fail(stack.back().line,
             "unbalanced bracket: cluster " + std::to_string(id) +
                 " opened but never closed (at #end document, line " +
                 std::to_string(line_no) + ")");
      }
    }
    std::map<int, Cluster> by_id;
    for (const auto& [span, id] : spans_) by_id[id].push_back(span);
    for (auto& [id, cluster] : by_id) doc_.clusters.push_back(std::move(cluster));
    canonicalize(doc_.clusters);
    docs_.push_back(std::move(doc_));
    in_doc_ = false;
  }

  std::vector<Document> docs_;
  Document doc_;
  bool in_doc_ = false;
  int token_count_ = 0;
  std::vector<std::string> sentence_;
  std::map<int, std::vector<OpenMention>> open_;
  std::map<Span, int> spans_;
};

// Markers for one token: closings innermost first, then single-token
// mentions, then openings outermost first. Closing before opening keeps
// abutting mentions of one cluster, e.g. (0,2) and (2,4), unambiguous.
std::string coref_cell(int token, const std::vector<std::pair<Span, int>>& spans) {
  std::vector<std::pair<Span, int>> closes, singles, opens;
  for (const auto& entry : spans) {
    const Span& s = entry.first;
    if (s.start == token && s.end == token) {
      singles.push_back(entry);
    } else if (s.end == token) {
      closes.push_back(entry);
    } else if (s.start == token) {
      opens.push_back(entry);
    }
  }
  std::sort(closes.begin(), closes.end(), [](const auto& a, const auto& b) {
    if (a.first.start != b.first.start) return a.first.start > b.first.start;
    return a.second < b.second;
  });
  std::sort(singles.begin(), singles.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  std::sort(opens.begin(), opens.end(), [](const auto& a, const auto& b) {
    if (a.first.end != b.first.end) return a.first.end > b.first.end;
    return a.second < b.second;
  });
  std::string out;
  auto append = [&out](const std::string& part) {
    if (!out.empty()) out += '|';
    out += part;
  };
  for (const auto& [s, id] : closes) append(std::to_string(id) + ")");
  for (const auto& [s, id] : singles) append("(" + std::to_string(id) + ")");
  for (const auto& [s, id] : opens) append("(" + std::to_string(id));
  return out.empty() ? "-" : out;
}

}  // namespace

std::vector<Document> parse_conll(std::string_view text) {
  ConllReader reader;
  auto docs = reader.read(text);
  for (const auto& d : docs) validate(d);
  return docs;
}

std::string write_conll(const std::vector<Document>& docs) {
  std::ostringstream os;
  for (const auto& doc : docs) {
    validate(doc);
    if (doc.doc_id.empty() ||
        doc.doc_id.find_first_of(" \t\r\n()") != std::string::npos) {
      throw Error(ErrorCategory::kInvalidArgument,
                  "doc_id '" + doc.doc_id + "' cannot be written to CoNLL");
    }
    auto part_it = doc.metadata.find("part");
    std::string part = part_it == doc.metadata.end() ? "000" : part_it->second;
    os << kBegin << " (" << doc.doc_id << "); part " << part << "\n";

    // Mentions indexed by the tokens where they start or end.
    std::map<int, std::vector<std::pair<Span, int>>> by_token;
    for (size_t id = 0; id < doc.clusters.size(); ++id) {
      for (const Span& s : doc.clusters[id]) {
        by_token[s.start].emplace_back(s, static_cast<int>(id));
        if (s.end != s.start) by_token[s.end].emplace_back(s, static_cast<int>(id));
      }
    }
    int token = 0;
    for (const auto& sentence : doc.sentences) {
      for (size_t i = 0; i < sentence.size(); ++i, ++token) {
        const std::string& word = sentence[i];
        if (word.empty() ||
            word.find_first_of(" \t\r\n") != std::string::npos) {
          throw Error(ErrorCategory::kInvalidArgument,
                      "document " + doc.doc_id + ": token " +
                          std::to_string(token) +
                          " is empty or contains whitespace");
        }
        auto it = by_token.find(token);
        std::string cell =
            it == by_token.end() ? "-" : coref_cell(token, it->second);
        os << doc.doc_id << '\t' << part << '\t' << i << '\t' << word
           << "\t-\t-\t-\t-\t-\t-\t*\t" << cell << "\n";
      }
      os << "\n";
    }
    os << kEnd << "\n";
  }
  return os.str();
}

}  // namespace incoref
