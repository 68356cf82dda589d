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

#include "incoref/encoder.h"

#include <cctype>
#include <cmath>

#include "incoref/error.h"
#include "incoref/nn.h"

namespace incoref {

void validate(const EncoderConfig& c) {
  if (c.num_layers < 1) throw Error(ErrorCategory::kConfig, "num_layers must be >= 1");
  if (c.hidden_dim < 4) throw Error(ErrorCategory::kConfig, "hidden_dim must be >= 4");
  if (c.hash_vocab_size < 2 || c.max_position < 1) {
    throw Error(ErrorCategory::kConfig,
                "hash_vocab_size and max_position must be positive");
  }
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string_view word_shape(std::string_view token) {
  if (token.empty()) return "p";
  const unsigned char c = static_cast<unsigned char>(token[0]);
  if (std::isupper(c)) return "Xx";
  if (std::islower(c)) return "x";
  if (std::isdigit(c)) return "d";
  return "p";
}

std::pair<std::size_t, std::size_t> token_rows(std::string_view token,
                                               std::size_t vocab) {
  std::string shape = "<shape>:";
  shape += word_shape(token);
  return {fnv1a(token) % vocab, fnv1a(shape) % vocab};
}

Encoder::Encoder(ParamStore& store, const EncoderConfig& config)
    : config_(config) {
  validate(config);
  const std::size_t d = config.hidden_dim;
  token_table_ = store.add("encoder.token_table", config.hash_vocab_size, d,
                           ParamGroup::kEncoder);
  position_table_ = store.add("encoder.position_table", config.max_position, d,
                              ParamGroup::kEncoder);
  for (int l = 0; l < config.num_layers; ++l) {
    const std::string prefix = "encoder.layer" + std::to_string(l);
    Layer layer;
    layer.weight = store.add(prefix + ".weight", d, d, ParamGroup::kEncoder);
    layer.bias = store.add(prefix + ".bias", d, 1, ParamGroup::kEncoder);
    layer.mix = store.add(prefix + ".mix", kMixWidth, 1, ParamGroup::kEncoder);
    layers_.push_back(layer);
  }
}

void Encoder::init(ParamStore& store, std::mt19937_64& rng) const {
  const double d = config_.hidden_dim;
  std::normal_distribution<double> token(0.0, 1.0);
  std::normal_distribution<double> position(0.0, 0.1);
  std::normal_distribution<double> weight(0.0, 1.0 / std::sqrt(d));
  for (double& v : store[token_table_].value.flat()) v = token(rng);
  for (double& v : store[position_table_].value.flat()) v = position(rng);
  for (const Layer& layer : layers_) {
    for (double& v : store[layer.weight].value.flat()) v = weight(rng);
    store[layer.bias].value.fill(0.0);
    store[layer.mix].value.fill(0.0);
  }
}

Matrix Encoder::embed_tokens(const ParamStore& store,
                             std::span<const std::string> tokens) const {
  if (tokens.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "embed_tokens: empty segment");
  }
  if (static_cast<int>(tokens.size()) > config_.max_position) {
    throw Error(ErrorCategory::kInvalidArgument,
                "embed_tokens: segment of " + std::to_string(tokens.size()) +
                    " tokens exceeds max_position " +
                    std::to_string(config_.max_position));
  }
  const Matrix& table = store[token_table_].value;
  const Matrix& pos = store[position_table_].value;
  Matrix out(tokens.size(), config_.hidden_dim);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    auto [lex, shape] = token_rows(tokens[t], table.rows());
    auto row = out.row(t);
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k] = table(lex, k) + table(shape, k) + pos(t, k);
    }
  }
  return out;
}

Matrix Encoder::encode(const ParamStore& store, const Matrix& embeddings,
                       EncoderCache* cache) const {
  const std::size_t n = embeddings.rows();
  const std::size_t d = config_.hidden_dim;
  if (embeddings.cols() != d) {
    throw Error(ErrorCategory::kShape,
                "encode: expected " + std::to_string(d) + " columns, got " +
                    std::to_string(embeddings.cols()));
  }
  if (cache) {
    cache->inputs.clear();
    cache->mixed.clear();
    cache->activations.clear();
    cache->mix_weights.clear();
  }
  Matrix h = embeddings;
  for (const Layer& layer : layers_) {
    Vec w = softmax(store[layer.mix].value.flat());
    Matrix u(n, d);
    for (std::size_t t = 0; t < n; ++t) {
      for (int o = -kMixRadius; o <= kMixRadius; ++o) {
        const long s = static_cast<long>(t) + o;
        if (s < 0 || s >= static_cast<long>(n)) continue;
        axpy(w[o + kMixRadius], h.row(s), u.row(t));
      }
    }
    const Matrix& W = store[layer.weight].value;
    const Matrix& b = store[layer.bias].value;
    Matrix a(n, d);
    Matrix next = h;
    for (std::size_t t = 0; t < n; ++t) {
      auto ut = u.row(t);
      for (std::size_t k = 0; k < d; ++k) {
        const double z = b[k] + dot(W.row(k), ut);
        a(t, k) = std::tanh(z);
        next(t, k) += a(t, k);
      }
    }
    if (cache) {
      cache->inputs.push_back(std::move(h));
      cache->mixed.push_back(std::move(u));
      cache->activations.push_back(std::move(a));
      cache->mix_weights.push_back(std::move(w));
    }
    h = std::move(next);
  }
  if (cache) cache->inputs.push_back(h);
  return h;
}

Matrix Encoder::forward(const ParamStore& store,
                        std::span<const std::string> tokens,
                        EncoderCache* cache) const {
  Matrix emb = embed_tokens(store, tokens);
  if (cache) {
    cache->rows.clear();
    for (const auto& tok : tokens) {
      cache->rows.push_back(token_rows(tok, store[token_table_].value.rows()));
    }
  }
  return encode(store, emb, cache);
}

void Encoder::backward(ParamStore& store, const EncoderCache& cache,
                       const Matrix& d_output) const {
  const std::size_t d = config_.hidden_dim;
  Matrix dh = d_output;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    const Layer& layer = layers_[l];
    const Matrix& h = cache.inputs[l];
    const Matrix& u = cache.mixed[l];
    const Matrix& a = cache.activations[l];
    const Vec& w = cache.mix_weights[l];
    const std::size_t n = h.rows();
    Param& W = store[layer.weight];
    Param& b = store[layer.bias];

    Matrix du(n, d);
    Vec dz(d);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t k = 0; k < d; ++k) {
        dz[k] = dh(t, k) * (1.0 - a(t, k) * a(t, k));
      }
      for (std::size_t k = 0; k < d; ++k) {
        if (dz[k] == 0.0) continue;
        b.grad[k] += dz[k];
        axpy(dz[k], u.row(t), W.grad.row(k));
        axpy(dz[k], W.value.row(k), du.row(t));
      }
    }
    // Residual path keeps dh; the mixing path adds to it.
    Vec dw(kMixWidth, 0.0);
    Matrix dprev = dh;
    for (std::size_t t = 0; t < n; ++t) {
      for (int o = -kMixRadius; o <= kMixRadius; ++o) {
        const long s = static_cast<long>(t) + o;
        if (s < 0 || s >= static_cast<long>(n)) continue;
        dw[o + kMixRadius] += dot(du.row(t), h.row(s));
        axpy(w[o + kMixRadius], du.row(t), dprev.row(s));
      }
    }
    Vec dmix = softmax_backward(w, dw);
    axpy(1.0, dmix, store[layer.mix].grad.flat());
    dh = std::move(dprev);
  }
  Param& table = store[token_table_];
  Param& pos = store[position_table_];
  for (std::size_t t = 0; t < dh.rows(); ++t) {
    auto [lex, shape] = cache.rows[t];
    axpy(1.0, dh.row(t), table.grad.row(lex));
    axpy(1.0, dh.row(t), table.grad.row(shape));
    axpy(1.0, dh.row(t), pos.grad.row(t));
  }
}

void Encoder::apply_freeze(ParamStore& store, FreezeMask mask) const {
  const int L = config_.num_layers;
  if (mask.trainable_top_layers < 0 || mask.trainable_top_layers > L) {
    throw Error(ErrorCategory::kInvalidArgument,
                "trainable_top_layers " + std::to_string(mask.trainable_top_layers) +
                    " outside [0, " + std::to_string(L) + "]");
  }
  const bool tables_frozen = mask.trainable_top_layers < L;
  store[token_table_].frozen = tables_frozen;
  store[position_table_].frozen = tables_frozen;
  for (int l = 0; l < L; ++l) {
    const bool frozen = l < L - mask.trainable_top_layers;
    for (ParamId id : layer_param_ids(l)) store[id].frozen = frozen;
  }
}

std::vector<ParamId> Encoder::param_ids() const {
  std::vector<ParamId> ids{token_table_, position_table_};
  for (int l = 0; l < static_cast<int>(layers_.size()); ++l) {
    for (ParamId id : layer_param_ids(l)) ids.push_back(id);
  }
  return ids;
}

std::vector<ParamId> Encoder::layer_param_ids(int layer) const {
  const Layer& l = layers_.at(layer);
  return {l.weight, l.bias, l.mix};
}

}  // namespace incoref
