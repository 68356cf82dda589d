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

#ifndef INCOREF_LOSSES_H_
#define INCOREF_LOSSES_H_

#include <string_view>
#include <vector>

#include "incoref/document.h"
#include "incoref/engine.h"
#include "incoref/model.h"

namespace incoref {

enum class Objective {
  // -log sum_{y in Ant(x)} P(c_y | x) / |Ant(x)| with s_c = s_m + s_a.
  kAntecedent,
  // -log P(M) for every span, plus -log P(E | M = 1) over s_a for gold
  // mentions that survive pruning.
  kJoint,
};

std::string_view objective_name(Objective o);
Objective objective_from_name(std::string_view name);

// Per-decision record, in processing order.
struct ScoredDecision {
  Span span;
  // Softmax over the clusters in state followed by the dummy cluster.
  Vec probabilities;
  double loss = 0.0;
};

struct LossTrace {
  std::vector<ScoredDecision> decisions;
  double mention_loss = 0.0;
  double linking_loss = 0.0;
};

// Teacher-forced document loss. After each gold mention's decision the state
// follows the gold assignment: it merges into the cluster of its entity or
// starts a new one; other spans never enter the state. Cluster embeddings
// carried over from earlier segments are constants. When with_grad is set the
// gradient of the returned loss is accumulated into model.params().
double document_loss(const Document& doc, CorefModel& model,
                     const EngineConfig& config, Objective objective,
                     bool with_grad, LossTrace* trace = nullptr);

inline double antecedent_loss(const Document& doc, CorefModel& model,
                              const EngineConfig& config, bool with_grad,
                              LossTrace* trace = nullptr) {
  return document_loss(doc, model, config, Objective::kAntecedent, with_grad,
                       trace);
}

inline double joint_loss(const Document& doc, CorefModel& model,
                         const EngineConfig& config, bool with_grad,
                         LossTrace* trace = nullptr) {
  return document_loss(doc, model, config, Objective::kJoint, with_grad, trace);
}

}  // namespace incoref

#endif  // INCOREF_LOSSES_H_
