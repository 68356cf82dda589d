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

#ifndef INCOREF_ENCODER_H_
#define INCOREF_ENCODER_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "incoref/params.h"
#include "incoref/tensor.h"

namespace incoref {

struct EncoderConfig {
  int num_layers = 6;
  int hidden_dim = 32;
  int hash_vocab_size = 4096;
  int max_position = 512;

  bool operator==(const EncoderConfig&) const = default;
};

void validate(const EncoderConfig& config);

// Number of trainable encoder layers counted from the top. Layers with index
// below num_layers - trainable_top_layers are frozen, and the embedding
// tables are frozen unless every layer is trainable.
struct FreezeMask {
  int trainable_top_layers = 0;
};

// Window of the context-mixing step: offsets -2..+2.
inline constexpr int kMixRadius = 2;
inline constexpr int kMixWidth = 2 * kMixRadius + 1;

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view s);
// Word-shape class: "Xx" leading capital, "x" lowercase, "d" digit, "p" other.
std::string_view word_shape(std::string_view token);
// The two hash rows summed into a token's lexical embedding: the token itself
// and its shape feature "<shape>:" + word_shape(token).
std::pair<std::size_t, std::size_t> token_rows(std::string_view token,
                                               std::size_t vocab);

struct EncoderCache {
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  // inputs[l] is the input to layer l; inputs[L] is the output.
  std::vector<Matrix> inputs;
  std::vector<Matrix> mixed;       // per layer, window average of its input
  std::vector<Matrix> activations;  // per layer, tanh(W mixed + b)
  std::vector<Vec> mix_weights;     // per layer, softmax of the window logits
};

// Toy layered encoder. Each layer l maps h to
//   h_t + tanh(W_l * sum_o w_{l,o} h_{t+o} + b_l),  o in [-2, 2],
// where w_l = softmax of learned window logits and out-of-range positions
// contribute zero.
class Encoder {
 public:
  Encoder() = default;
  Encoder(ParamStore& store, const EncoderConfig& config);

  const EncoderConfig& config() const { return config_; }
  void init(ParamStore& store, std::mt19937_64& rng) const;

  // hashed lexical rows + position rows; n x d.
  Matrix embed_tokens(const ParamStore& store,
                      std::span<const std::string> tokens) const;
  Matrix encode(const ParamStore& store, const Matrix& embeddings,
                EncoderCache* cache = nullptr) const;
  // embed_tokens followed by encode, caching everything for backward().
  Matrix forward(const ParamStore& store, std::span<const std::string> tokens,
                 EncoderCache* cache) const;
  void backward(ParamStore& store, const EncoderCache& cache,
                const Matrix& d_output) const;

  void apply_freeze(ParamStore& store, FreezeMask mask) const;
  // All parameter ids owned by the encoder.
  std::vector<ParamId> param_ids() const;
  std::vector<ParamId> layer_param_ids(int layer) const;

 private:
  struct Layer {
    ParamId weight;
    ParamId bias;
    ParamId mix;
  };

  EncoderConfig config_;
  ParamId token_table_ = 0;
  ParamId position_table_ = 0;
  std::vector<Layer> layers_;
};

}  // namespace incoref

#endif  // INCOREF_ENCODER_H_
