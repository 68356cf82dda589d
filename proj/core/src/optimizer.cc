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

#include "incoref/optimizer.h"

#include <cmath>

#include "incoref/error.h"

namespace incoref {

double clip_grad_norm(ParamStore& store, double max_norm) {
  double sq = 0.0;
  for (const Param& p : store) {
    if (p.frozen) continue;
    if (!all_finite(p.grad.flat())) {
      throw Error(ErrorCategory::kNumeric,
                  "non-finite gradient in parameter " + p.name);
    }
    sq += squared_norm(p.grad.flat());
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (Param& p : store) {
      if (p.frozen) continue;
      for (double& g : p.grad.flat()) g *= scale;
    }
  }
  return norm;
}

Optimizer::Optimizer(const ParamStore& store, OptimizerConfig config)
    : config_(config) {
  for (const Param& p : store) {
    state_.first_moment.emplace_back(p.value.rows(), p.value.cols());
    state_.second_moment.emplace_back(p.value.rows(), p.value.cols());
  }
}

StepStats Optimizer::step(ParamStore& store) {
  if (store.size() != state_.first_moment.size()) {
    throw Error(ErrorCategory::kShape, "optimizer state does not match params");
  }
  StepStats stats;
  stats.grad_norm = clip_grad_norm(store, config_.clip_norm);
  if (stats.grad_norm > config_.clip_norm) {
    stats.clip_scale = config_.clip_norm / stats.grad_norm;
  }
  ++state_.step;
  const double t = static_cast<double>(state_.step);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < store.size(); ++i) {
    Param& p = store[i];
    if (p.frozen) continue;
    const bool encoder = p.group == ParamGroup::kEncoder;
    const double lr = encoder ? config_.lr_encoder : config_.lr_task;
    const double decay = encoder ? config_.encoder_weight_decay : 0.0;
    auto value = p.value.flat();
    auto grad = p.grad.flat();
    auto m = state_.first_moment[i].flat();
    auto v = state_.second_moment[i].flat();
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = grad[k];
      m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g;
      v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      if (decay != 0.0) value[k] -= lr * decay * value[k];
      value[k] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
  store.zero_grad();
  return stats;
}

}  // namespace incoref
