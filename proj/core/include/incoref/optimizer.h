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

#ifndef INCOREF_OPTIMIZER_H_
#define INCOREF_OPTIMIZER_H_

#include <cstdint>
#include <vector>

#include "incoref/params.h"
#include "incoref/tensor.h"

namespace incoref {

struct OptimizerConfig {
  double lr_task = 2e-4;
  double lr_encoder = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Decoupled weight decay, applied to the encoder group only.
  double encoder_weight_decay = 0.01;
  double clip_norm = 10.0;
};

struct OptimizerState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::uint64_t step = 0;
};

struct StepStats {
  double grad_norm = 0.0;  // before clipping
  double clip_scale = 1.0;
};

// Adam on the task group, AdamW on the encoder group, after clipping the
// global gradient norm of all trainable tensors. Gradients (frozen ones
// included) are zeroed after every step.
class Optimizer {
 public:
  Optimizer(const ParamStore& store, OptimizerConfig config);

  StepStats step(ParamStore& store);

  const OptimizerConfig& config() const { return config_; }
  const OptimizerState& state() const { return state_; }
  OptimizerState& mutable_state() { return state_; }

 private:
  OptimizerConfig config_;
  OptimizerState state_;
};

// Scales gradients of trainable tensors so that their joint L2 norm is at
// most max_norm. Returns the norm before clipping.
double clip_grad_norm(ParamStore& store, double max_norm);

}  // namespace incoref

#endif  // INCOREF_OPTIMIZER_H_
