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

#include "incoref/model.h"

#include <random>

#include "incoref/error.h"
#include "json.hpp"

namespace incoref {

int width_bucket(int width) {
  if (width < 1) {
    throw Error(ErrorCategory::kInvalidArgument, "span width must be >= 1");
  }
  if (width <= 4) return width - 1;
  if (width <= 7) return 4;
  if (width <= 15) return 5;
  if (width <= 31) return 6;
  return 7;
}

std::string to_json(const ModelConfig& c) {
  nlohmann::json j{{"num_layers", c.encoder.num_layers},
                   {"hidden_dim", c.encoder.hidden_dim},
                   {"hash_vocab_size", c.encoder.hash_vocab_size},
                   {"max_position", c.encoder.max_position},
                   {"width_dim", c.width_dim},
                   {"ffnn_hidden", c.ffnn_hidden},
                   {"seed", c.seed}};
  return j.dump();
}

ModelConfig model_config_from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    ModelConfig c;
    c.encoder.num_layers = j.at("num_layers").get<int>();
    c.encoder.hidden_dim = j.at("hidden_dim").get<int>();
    c.encoder.hash_vocab_size = j.at("hash_vocab_size").get<int>();
    c.encoder.max_position = j.at("max_position").get<int>();
    c.width_dim = j.at("width_dim").get<int>();
    c.ffnn_hidden = j.at("ffnn_hidden").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kParse, std::string("model config: ") + e.what());
  }
}

CorefModel::CorefModel(const ModelConfig& config)
    : config_(config), encoder_(params_, config.encoder) {
  if (config.width_dim < 1 || config.ffnn_hidden < 1) {
    throw Error(ErrorCategory::kConfig, "width_dim and ffnn_hidden must be >= 1");
  }
  const std::size_t d = token_dim();
  const std::size_t span = span_dim();
  span_attention_ = params_.add("span.attention", d, 1, ParamGroup::kTask);
  width_table_ = params_.add("span.width_table", kWidthBuckets, config.width_dim,
                             ParamGroup::kTask);
  mention_scorer_ = FeedForward(params_, "mention_scorer", span,
                                config.ffnn_hidden, ParamGroup::kTask);
  pair_scorer_ = FeedForward(params_, "pair_scorer", 3 * span,
                             config.ffnn_hidden, ParamGroup::kTask);
  merge_scorer_ = FeedForward(params_, "merge_scorer", 3 * span,
                              config.ffnn_hidden, ParamGroup::kTask);

  std::mt19937_64 rng(config.seed);
  encoder_.init(params_, rng);
  std::normal_distribution<double> small(0.0, 0.1);
  for (double& v : params_[span_attention_].value.flat()) v = small(rng);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (double& v : params_[width_table_].value.flat()) v = unit(rng);
  mention_scorer_.init(params_, rng);
  pair_scorer_.init(params_, rng);
  merge_scorer_.init(params_, rng);
}

void CorefModel::unfreeze_all() {
  for (Param& p : params_) p.frozen = false;
}

std::vector<std::string> incompatible_tensors(const ParamStore& a,
                                              const ParamStore& b) {
  std::vector<std::string> out;
  for (const Param& p : a) {
    if (!b.contains(p.name)) {
      out.push_back(p.name + " (missing)");
      continue;
    }
    const Param& q = b[b.id_of(p.name)];
    if (!p.value.same_shape(q.value)) {
      out.push_back(p.name + " (" + std::to_string(p.value.rows()) + "x" +
                    std::to_string(p.value.cols()) + " vs " +
                    std::to_string(q.value.rows()) + "x" +
                    std::to_string(q.value.cols()) + ")");
    }
  }
  for (const Param& q : b) {
    if (!a.contains(q.name)) out.push_back(q.name + " (unexpected)");
  }
  return out;
}

}  // namespace incoref
