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

#include "run_config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "incoref/error.h"

namespace incoref::cli {
namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }
std::string fmt(IntRange r) { return fmt(r.lo) + "-" + fmt(r.hi); }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  throw Error(ErrorCategory::kConfig,
              "key " + key + ": expected " + expected + ", got '" + value + "'");
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty();
}

std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  std::uint64_t seed = 0;
  if (!parse_number(text, seed)) {
    throw Error(ErrorCategory::kConfig,
                origin + ": seed must be a nonnegative integer, got '" + text + "'");
  }
  return seed;
}

}  // namespace

RunConfig::RunConfig() {
  const char* env_seed = std::getenv("COREF_SEED");
  values_["seed"] = "1";
  if (env_seed != nullptr && *env_seed != '\0') {
    values_["seed"] = std::to_string(parse_seed(env_seed, "COREF_SEED"));
  }

  const ModelConfig model;
  values_["model.num_layers"] = fmt(model.encoder.num_layers);
  values_["model.hidden_dim"] = fmt(model.encoder.hidden_dim);
  values_["model.hash_vocab_size"] = fmt(model.encoder.hash_vocab_size);
  values_["model.max_position"] = fmt(model.encoder.max_position);
  values_["model.width_dim"] = fmt(model.width_dim);
  values_["model.ffnn_hidden"] = fmt(model.ffnn_hidden);

  const EngineConfig engine;
  for (const std::string prefix : {"engine.", "source."}) {
    values_[prefix + "emit_singletons"] = "auto";
  }
  values_["engine.prune_ratio"] = fmt(engine.prune_ratio);
  values_["engine.max_span_width"] = fmt(engine.max_span_width);
  values_["engine.pruning_mode"] = "reformulated";
  values_["engine.gold_mentions"] = fmt(engine.gold_mentions);
  values_["engine.max_segment_len"] = fmt(engine.max_segment_len);

  const TrainConfig train;
  values_["train.max_epochs"] = fmt(train.max_epochs);
  values_["train.patience"] = fmt(train.patience);
  values_["train.lr_task"] = fmt(train.optimizer.lr_task);
  values_["train.lr_encoder"] = fmt(train.optimizer.lr_encoder);
  values_["train.encoder_weight_decay"] = fmt(train.optimizer.encoder_weight_decay);
  values_["train.clip_norm"] = fmt(train.optimizer.clip_norm);
  values_["train.objective"] = std::string(objective_name(train.objective));
  values_["train.trainable_top_layers"] = "all";

  const SchemeConfig scheme;
  values_["synth.num_docs"] = fmt(scheme.num_docs);
  values_["synth.annotate_singletons"] = fmt(scheme.annotate_singletons);
  values_["synth.entity_types"] = "all";
  values_["synth.vocab_size"] = fmt(scheme.vocab_size);
  values_["synth.name_pool_size"] = fmt(scheme.name_pool_size);
  values_["synth.sentences_per_doc"] = fmt(scheme.sentences_per_doc);
  values_["synth.sentence_length"] = fmt(scheme.sentence_length);
  values_["synth.entities_per_doc"] = fmt(scheme.entities_per_doc);
  values_["synth.mentions_per_entity"] = fmt(scheme.mentions_per_entity);
  values_["synth.doc_prefix"] = scheme.doc_prefix;

  values_["data.folds"] = "0";
  values_["data.fold"] = "0";

  values_["experiment.train_sizes"] = "";
  values_["experiment.dev_subset_sizes"] = "";
  values_["experiment.num_subsets"] = "20";
  values_["experiment.top_k"] = "";
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  load_text(ss.str(), path);
}

void RunConfig::load_text(std::string_view text, std::string_view origin) {
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw Error(ErrorCategory::kConfig, where + ": malformed section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCategory::kConfig, where + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    const std::string full = section.empty() ? key : section + "." + key;
    if (!values_.contains(full)) {
      throw Error(ErrorCategory::kConfig, where + ": unknown key " + full);
    }
    set(full, value);
  }
}

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCategory::kConfig,
                "override '" + std::string(assignment) + "' is not key=value");
  }
  set(std::string(trim(assignment.substr(0, eq))),
      std::string(trim(assignment.substr(eq + 1))));
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCategory::kConfig, "unknown key " + key);
  if (key == "seed") parse_seed(value, "key seed");
  it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCategory::kConfig, "unknown key " + key);
  return it->second;
}

int RunConfig::get_int(const std::string& key) const {
  int v = 0;
  if (!parse_number(get(key), v)) bad_value(key, get(key), "an integer");
  return v;
}

double RunConfig::get_double(const std::string& key) const {
  double v = 0.0;
  if (!parse_number(get(key), v)) bad_value(key, get(key), "a number");
  return v;
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "true or false");
}

std::optional<bool> RunConfig::get_auto_bool(const std::string& key) const {
  if (get(key) == "auto") return std::nullopt;
  return get_bool(key);
}

std::vector<int> RunConfig::get_int_list(const std::string& key) const {
  std::vector<int> out;
  std::string_view rest = get(key);
  while (!trim(rest).empty()) {
    const auto comma = rest.find(',');
    int v = 0;
    if (!parse_number(rest.substr(0, comma), v)) {
      bad_value(key, get(key), "a comma-separated list of integers");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

IntRange RunConfig::get_range(const std::string& key) const {
  const std::string& v = get(key);
  const auto dash = v.find('-');
  IntRange r;
  if (dash == std::string::npos) {
    if (!parse_number(v, r.lo)) bad_value(key, v, "an integer or lo-hi range");
    r.hi = r.lo;
    return r;
  }
  if (!parse_number(std::string_view(v).substr(0, dash), r.lo) ||
      !parse_number(std::string_view(v).substr(dash + 1), r.hi)) {
    bad_value(key, v, "an integer or lo-hi range");
  }
  return r;
}

std::uint64_t RunConfig::seed() const { return parse_seed(get("seed"), "key seed"); }

ModelConfig RunConfig::model_config() const {
  ModelConfig m;
  m.encoder.num_layers = get_int("model.num_layers");
  m.encoder.hidden_dim = get_int("model.hidden_dim");
  m.encoder.hash_vocab_size = get_int("model.hash_vocab_size");
  m.encoder.max_position = get_int("model.max_position");
  m.width_dim = get_int("model.width_dim");
  m.ffnn_hidden = get_int("model.ffnn_hidden");
  m.seed = seed();
  validate(m.encoder);
  return m;
}

EngineConfig RunConfig::engine_config() const {
  EngineConfig e;
  e.prune_ratio = get_double("engine.prune_ratio");
  e.max_span_width = get_int("engine.max_span_width");
  const std::string& mode = get("engine.pruning_mode");
  if (mode == "original") {
    e.pruning_mode = PruningMode::kOriginal;
  } else if (mode == "reformulated") {
    e.pruning_mode = PruningMode::kReformulated;
  } else {
    bad_value("engine.pruning_mode", mode, "original or reformulated");
  }
  e.gold_mentions = get_bool("engine.gold_mentions");
  e.emit_singletons = get_auto_bool("engine.emit_singletons");
  e.max_segment_len = get_int("engine.max_segment_len");
  validate(e);
  return e;
}

EngineConfig RunConfig::source_engine_config() const {
  EngineConfig e = engine_config();
  e.emit_singletons = get_auto_bool("source.emit_singletons");
  return e;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.max_epochs = get_int("train.max_epochs");
  t.patience = get_int("train.patience");
  t.optimizer.lr_task = get_double("train.lr_task");
  t.optimizer.lr_encoder = get_double("train.lr_encoder");
  t.optimizer.encoder_weight_decay = get_double("train.encoder_weight_decay");
  t.optimizer.clip_norm = get_double("train.clip_norm");
  t.objective = objective_from_name(get("train.objective"));
  if (get("train.trainable_top_layers") != "all") {
    t.freeze = FreezeMask{get_int("train.trainable_top_layers")};
  }
  t.seed = seed();
  t.engine = engine_config();
  validate(t);
  return t;
}

SchemeConfig RunConfig::scheme_config() const {
  SchemeConfig s;
  s.num_docs = get_int("synth.num_docs");
  s.annotate_singletons = get_bool("synth.annotate_singletons");
  const std::string& types = get("synth.entity_types");
  if (types != "all") {
    std::set<std::string> allowed;
    std::string_view rest = types;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      if (!item.empty()) allowed.emplace(item);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    s.allowed_entity_types = std::move(allowed);
  }
  s.vocab_size = get_int("synth.vocab_size");
  s.name_pool_size = get_int("synth.name_pool_size");
  s.sentences_per_doc = get_range("synth.sentences_per_doc");
  s.sentence_length = get_range("synth.sentence_length");
  s.entities_per_doc = get_range("synth.entities_per_doc");
  s.mentions_per_entity = get_range("synth.mentions_per_entity");
  s.doc_prefix = get("synth.doc_prefix");
  s.seed = seed();
  validate(s);
  return s;
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "seed = " << get("seed") << "\n";
  std::string section;
  for (const auto& [key, value] : values_) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) continue;
    const std::string s = key.substr(0, dot);
    if (s != section) {
      out << "\n[" << s << "]\n";
      section = s;
    }
    out << key.substr(dot + 1) << " = " << value << "\n";
  }
  return out.str();
}

}  // namespace incoref::cli
