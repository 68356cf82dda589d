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

#ifndef INCOREF_TOOLS_RUN_CONFIG_H_
#define INCOREF_TOOLS_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "incoref/engine.h"
#include "incoref/model.h"
#include "incoref/synth.h"
#include "incoref/training.h"

namespace incoref::cli {

// Flat key=value configuration with [section] headers. Keys are addressed
// as "section.key"; "seed" is the only top-level key. Every key has a
// default, unknown keys are rejected, and later assignments win, so the
// effective value is: --set flag, then config file, then COREF_SEED (seed
// only), then the built-in default.
class RunConfig {
 public:
  RunConfig();

  void load_file(const std::string& path);
  void load_text(std::string_view text, std::string_view origin);
  // "section.key=value"
  void apply_override(std::string_view assignment);
  void set(const std::string& key, const std::string& value);

  bool has_key(const std::string& key) const { return values_.contains(key); }
  const std::string& get(const std::string& key) const;
  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  // "auto" maps to nullopt.
  std::optional<bool> get_auto_bool(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;
  IntRange get_range(const std::string& key) const;

  std::uint64_t seed() const;
  ModelConfig model_config() const;
  EngineConfig engine_config() const;
  // Engine used to score source-side data in forgetting runs.
  EngineConfig source_engine_config() const;
  TrainConfig train_config() const;
  SchemeConfig scheme_config() const;

  // Canonical text form, one section per block, keys sorted.
  std::string to_text() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace incoref::cli

#endif  // INCOREF_TOOLS_RUN_CONFIG_H_
