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

#ifndef INCOREF_TRAINING_H_
#define INCOREF_TRAINING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "incoref/document.h"
#include "incoref/engine.h"
#include "incoref/gradcheck.h"
#include "incoref/losses.h"
#include "incoref/metrics.h"
#include "incoref/model.h"
#include "incoref/optimizer.h"

namespace incoref {

struct TrainConfig {
  int max_epochs = 100;
  int patience = 10;
  OptimizerConfig optimizer;
  std::uint64_t seed = 1;
  Objective objective = Objective::kJoint;
  // Unset: every tensor trainable.
  std::optional<FreezeMask> freeze;
  EngineConfig engine;
  // Keep training to max_epochs after early stopping would have triggered.
  // The returned checkpoint is still the one early stopping selects.
  bool run_all_epochs = false;
  // Store per-epoch dev (and test) predictions in the history.
  bool record_predictions = false;
  // Compute the teacher-forced dev loss after every epoch.
  bool track_dev_loss = false;
};

void validate(const TrainConfig& config);
// Stable hash of the model-facing training configuration.
std::string config_hash(const TrainConfig& config, const ModelConfig& model);

struct EpochRecord {
  int epoch = 0;  // 1-based; 0 is the untrained initialization
  double train_loss = 0.0;
  double dev_avg_f1 = 0.0;
  std::optional<double> dev_loss;
  std::optional<double> test_avg_f1;
  std::vector<Clustering> dev_predictions;
  std::vector<Clustering> test_predictions;
};

struct Checkpoint {
  CorefModel model;
  int epoch = 0;
  double dev_avg_f1 = 0.0;
  std::string config_hash;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochRecord> history;
  // Epoch at which early stopping triggered, if it did.
  std::optional<int> stopped_at;
};

struct TrainHooks {
  // Scored after each epoch when set; never used for selection.
  const std::vector<Document>* test_docs = nullptr;
  std::function<void(const EpochRecord&)> on_epoch;
};

// Index of the epoch early stopping selects from a sequence of dev scores:
// the first strict maximum seen before `patience` consecutive epochs pass
// without improvement.
std::size_t select_epoch(std::span<const double> dev_scores, int patience);

metrics::MetricReport evaluate(const CorefModel& model,
                               const std::vector<Document>& docs,
                               const EngineConfig& config,
                               std::vector<Clustering>* predictions = nullptr);

// Sum of teacher-forced losses, no gradient.
double corpus_loss(const CorefModel& model, const std::vector<Document>& docs,
                   const EngineConfig& config, Objective objective);

TrainResult train(const std::vector<Document>& train_docs,
                  const std::vector<Document>& dev_docs, const CorefModel& init,
                  const TrainConfig& config, const TrainHooks& hooks = {});

// Copy of `source` after checking that it has exactly the tensors a model
// built from `target` would have; kIncompatible lists the offending tensors.
CorefModel init_from(const CorefModel& source, const ModelConfig& target);

// Initializes every tensor from `source` and trains on the target data. With
// no target training documents the source is evaluated on the target dev set
// and returned unchanged.
TrainResult continued_train(const CorefModel& source,
                            const std::vector<Document>& target_train,
                            const std::vector<Document>& target_dev,
                            const TrainConfig& config,
                            const TrainHooks& hooks = {});

struct LossGradCheck {
  GradCheckResult result;
  double loss = 0.0;
  std::size_t decisions = 0;  // linking decisions scored in the loss
};

// Finite-difference check of document_loss. A freshly initialized model
// prunes nearly every gold mention, so `warmup_steps` teacher-forced Adam
// steps (task learning rate 1e-2) on the same document run first to bring
// linking terms into the loss.
LossGradCheck check_loss_gradients(const Document& doc, const ModelConfig& model,
                                   const EngineConfig& engine, Objective objective,
                                   int warmup_steps,
                                   const GradCheckOptions& options = {});

// History as CSV: epoch,train_loss,dev_avg_f1[,dev_loss][,test_avg_f1].
std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace incoref

#endif  // INCOREF_TRAINING_H_
