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

#ifndef INCOREF_MODEL_H_
#define INCOREF_MODEL_H_

#include <cstdint>
#include <string>

#include "incoref/encoder.h"
#include "incoref/nn.h"
#include "incoref/params.h"

namespace incoref {

// Width buckets {1, 2, 3, 4, 5-7, 8-15, 16-31, 32+}.
inline constexpr int kWidthBuckets = 8;
int width_bucket(int width);

struct ModelConfig {
  EncoderConfig encoder;
  int width_dim = 16;
  int ffnn_hidden = 512;
  std::uint64_t seed = 1;

  bool operator==(const ModelConfig&) const = default;
};

std::string to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const std::string& text);

// All trainable state of the coreference model: the encoder, the span
// attention vector and width table, and the three feed-forward scorers
// (mention s_m, cluster pair s_a, merge weight alpha).
//
// Span embeddings are [x_a; x_b; attention average; width embedding], so
// span_dim() = 3 * hidden_dim + width_dim. Cluster embeddings share that size.
class CorefModel {
 public:
  explicit CorefModel(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const Encoder& encoder() const { return encoder_; }

  std::size_t token_dim() const { return config_.encoder.hidden_dim; }
  std::size_t span_dim() const { return 3 * token_dim() + config_.width_dim; }

  ParamId span_attention() const { return span_attention_; }
  ParamId width_table() const { return width_table_; }
  const FeedForward& mention_scorer() const { return mention_scorer_; }
  const FeedForward& pair_scorer() const { return pair_scorer_; }
  const FeedForward& merge_scorer() const { return merge_scorer_; }

  void apply_freeze(FreezeMask mask) { encoder_.apply_freeze(params_, mask); }
  void unfreeze_all();

 private:
  ModelConfig config_;
  ParamStore params_;
  Encoder encoder_;
  ParamId span_attention_ = 0;
  ParamId width_table_ = 0;
  FeedForward mention_scorer_;
  FeedForward pair_scorer_;
  FeedForward merge_scorer_;
};

// Lists tensors whose names or shapes differ; empty when compatible.
std::vector<std::string> incompatible_tensors(const ParamStore& a,
                                              const ParamStore& b);

}  // namespace incoref

#endif  // INCOREF_MODEL_H_
