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

#ifndef INCOREF_NN_H_
#define INCOREF_NN_H_

#include <random>
#include <span>
#include <string>

#include "incoref/params.h"
#include "incoref/tensor.h"

namespace incoref {

// Forward/backward primitives for the fixed coreference graph. Backward
// functions accumulate (+=) into parameter gradients and into any non-empty
// input-gradient span they are given.

double sigmoid(double x);
// log(sigmoid(x)) without overflow for large |x|.
double log_sigmoid(double x);
double log_sum_exp(std::span<const double> x);
Vec softmax(std::span<const double> logits);
// d logits from the softmax output and d output.
Vec softmax_backward(std::span<const double> probs,
                     std::span<const double> d_probs);

class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& store, const std::string& name, std::size_t in,
         std::size_t out, ParamGroup group);

  std::size_t in() const { return in_; }
  std::size_t out() const { return out_; }
  ParamId weight() const { return weight_; }
  ParamId bias() const { return bias_; }

  // Weights ~ N(0, scale^2 / in), bias 0.
  void init(ParamStore& store, std::mt19937_64& rng, double scale = 1.0) const;

  void forward(const ParamStore& store, std::span<const double> x,
               std::span<double> y) const;
  void backward(ParamStore& store, std::span<const double> x,
                std::span<const double> dy, std::span<double> dx) const;

 private:
  ParamId weight_ = 0;  // out x in
  ParamId bias_ = 0;    // out x 1
  std::size_t in_ = 0;
  std::size_t out_ = 0;
};

// x -> tanh(W1 x + b1) -> w2 . h + b2
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParamStore& store, const std::string& name, std::size_t in,
              std::size_t hidden, ParamGroup group);

  void init(ParamStore& store, std::mt19937_64& rng) const;

  std::size_t in() const { return hidden_.in(); }
  std::size_t hidden_size() const { return hidden_.out(); }
  const Linear& hidden_layer() const { return hidden_; }
  const Linear& output_layer() const { return output_; }

  // `activations` receives tanh(W1 x + b1) for the backward pass.
  double forward(const ParamStore& store, std::span<const double> x,
                 Vec* activations = nullptr) const;
  void backward(ParamStore& store, std::span<const double> x,
                std::span<const double> activations, double d_score,
                std::span<double> dx) const;

 private:
  Linear hidden_;
  Linear output_;
};

// [x; c; x * c]
Vec pair_features(std::span<const double> x, std::span<const double> c);
void pair_features_backward(std::span<const double> x, std::span<const double> c,
                            std::span<const double> d_features,
                            std::span<double> dx, std::span<double> dc);

// out = sum_t softmax(logits)_t * rows[t]; `weights` receives the softmax.
Vec attention_pool(const Matrix& rows, std::size_t begin, std::size_t end,
                   std::span<const double> logits, Vec* weights);
// Returns d logits; accumulates d rows.
Vec attention_pool_backward(const Matrix& rows, std::size_t begin,
                            std::size_t end, std::span<const double> weights,
                            std::span<const double> d_out, Matrix& d_rows);

}  // namespace incoref

#endif  // INCOREF_NN_H_
