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

#include "incoref/nn.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "incoref/error.h"

namespace incoref {
namespace {

[[noreturn]] void shape_error(const char* op, std::size_t expected,
                              std::size_t got) {
  std::ostringstream os;
  os << op << ": expected size " << expected << ", got " << got;
  throw Error(ErrorCategory::kShape, os.str());
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -INFINITY;
  const double m = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

Vec softmax(std::span<const double> logits) {
  Vec p(logits.size());
  if (logits.empty()) return p;
  const double m = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    s += p[i];
  }
  for (double& v : p) v /= s;
  return p;
}

Vec softmax_backward(std::span<const double> probs,
                     std::span<const double> d_probs) {
  const double inner = dot(probs, d_probs);
  Vec d(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    d[i] = probs[i] * (d_probs[i] - inner);
  }
  return d;
}

Linear::Linear(ParamStore& store, const std::string& name, std::size_t in,
               std::size_t out, ParamGroup group)
    : weight_(store.add(name + ".weight", out, in, group)),
      bias_(store.add(name + ".bias", out, 1, group)),
      in_(in),
      out_(out) {}

void Linear::init(ParamStore& store, std::mt19937_64& rng, double scale) const {
  std::normal_distribution<double> normal(0.0, scale / std::sqrt(double(in_)));
  for (double& w : store[weight_].value.flat()) w = normal(rng);
  store[bias_].value.fill(0.0);
}

void Linear::forward(const ParamStore& store, std::span<const double> x,
                     std::span<double> y) const {
  if (x.size() != in_) shape_error("linear input", in_, x.size());
  if (y.size() != out_) shape_error("linear output", out_, y.size());
  const Matrix& w = store[weight_].value;
  const Matrix& b = store[bias_].value;
  for (std::size_t o = 0; o < out_; ++o) y[o] = b[o] + dot(w.row(o), x);
}

void Linear::backward(ParamStore& store, std::span<const double> x,
                      std::span<const double> dy, std::span<double> dx) const {
  if (x.size() != in_) shape_error("linear backward input", in_, x.size());
  if (dy.size() != out_) shape_error("linear backward grad", out_, dy.size());
  if (!dx.empty() && dx.size() != in_) {
    shape_error("linear backward input grad", in_, dx.size());
  }
  Param& w = store[weight_];
  Param& b = store[bias_];
  for (std::size_t o = 0; o < out_; ++o) {
    const double g = dy[o];
    if (g == 0.0) continue;
    b.grad[o] += g;
    axpy(g, x, w.grad.row(o));
    if (!dx.empty()) axpy(g, w.value.row(o), dx);
  }
}

FeedForward::FeedForward(ParamStore& store, const std::string& name,
                         std::size_t in, std::size_t hidden, ParamGroup group)
    : hidden_(store, name + ".hidden", in, hidden, group),
      output_(store, name + ".out", hidden, 1, group) {}

void FeedForward::init(ParamStore& store, std::mt19937_64& rng) const {
  hidden_.init(store, rng);
  output_.init(store, rng);
}

double FeedForward::forward(const ParamStore& store, std::span<const double> x,
                            Vec* activations) const {
  Vec h(hidden_.out());
  hidden_.forward(store, x, h);
  for (double& v : h) v = std::tanh(v);
  double score = 0.0;
  output_.forward(store, h, std::span<double>(&score, 1));
  if (activations) *activations = std::move(h);
  return score;
}

void FeedForward::backward(ParamStore& store, std::span<const double> x,
                           std::span<const double> activations, double d_score,
                           std::span<double> dx) const {
  if (d_score == 0.0) return;
  Vec dh(hidden_.out(), 0.0);
  output_.backward(store, activations, std::span<const double>(&d_score, 1), dh);
  for (std::size_t i = 0; i < dh.size(); ++i) {
    dh[i] *= 1.0 - activations[i] * activations[i];
  }
  hidden_.backward(store, x, dh, dx);
}

Vec pair_features(std::span<const double> x, std::span<const double> c) {
  if (x.size() != c.size()) shape_error("pair_features", x.size(), c.size());
  const std::size_t d = x.size();
  Vec f(3 * d);
  for (std::size_t i = 0; i < d; ++i) {
    f[i] = x[i];
    f[d + i] = c[i];
    f[2 * d + i] = x[i] * c[i];
  }
  return f;
}

void pair_features_backward(std::span<const double> x, std::span<const double> c,
                            std::span<const double> d_features,
                            std::span<double> dx, std::span<double> dc) {
  const std::size_t d = x.size();
  if (d_features.size() != 3 * d) {
    shape_error("pair_features backward", 3 * d, d_features.size());
  }
  for (std::size_t i = 0; i < d; ++i) {
    const double dp = d_features[2 * d + i];
    if (!dx.empty()) dx[i] += d_features[i] + dp * c[i];
    if (!dc.empty()) dc[i] += d_features[d + i] + dp * x[i];
  }
}

Vec attention_pool(const Matrix& rows, std::size_t begin, std::size_t end,
                   std::span<const double> logits, Vec* weights) {
  if (logits.size() != end - begin) {
    shape_error("attention_pool", end - begin, logits.size());
  }
  Vec w = softmax(logits);
  Vec out(rows.cols(), 0.0);
  for (std::size_t t = begin; t < end; ++t) axpy(w[t - begin], rows.row(t), out);
  if (weights) *weights = std::move(w);
  return out;
}

Vec attention_pool_backward(const Matrix& rows, std::size_t begin,
                            std::size_t end, std::span<const double> weights,
                            std::span<const double> d_out, Matrix& d_rows) {
  Vec d_w(end - begin);
  for (std::size_t t = begin; t < end; ++t) {
    d_w[t - begin] = dot(d_out, rows.row(t));
    axpy(weights[t - begin], d_out, d_rows.row(t));
  }
  return softmax_backward(weights, d_w);
}

}  // namespace incoref
