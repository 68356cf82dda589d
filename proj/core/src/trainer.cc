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

#include "incoref/training.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "incoref/error.h"
#include "json.hpp"

namespace incoref {

void validate(const TrainConfig& config) {
  if (config.max_epochs < 0) {
    throw Error(ErrorCategory::kConfig, "max_epochs must be >= 0");
  }
  if (config.patience < 1 || config.patience > std::max(config.max_epochs, 1)) {
    throw Error(ErrorCategory::kConfig, "patience must be in [1, max_epochs]");
  }
  if (!(config.optimizer.lr_task > 0.0) || !(config.optimizer.lr_encoder > 0.0)) {
    throw Error(ErrorCategory::kConfig, "learning rates must be positive");
  }
  if (!(config.optimizer.clip_norm > 0.0)) {
    throw Error(ErrorCategory::kConfig, "clip_norm must be positive");
  }
  validate(config.engine);
}

std::string config_hash(const TrainConfig& config, const ModelConfig& model) {
  nlohmann::json j{
      {"model", nlohmann::json::parse(to_json(model))},
      {"max_epochs", config.max_epochs},
      {"patience", config.patience},
      {"lr_task", config.optimizer.lr_task},
      {"lr_encoder", config.optimizer.lr_encoder},
      {"beta1", config.optimizer.beta1},
      {"beta2", config.optimizer.beta2},
      {"epsilon", config.optimizer.epsilon},
      {"encoder_weight_decay", config.optimizer.encoder_weight_decay},
      {"clip_norm", config.optimizer.clip_norm},
      {"seed", config.seed},
      {"objective", std::string(objective_name(config.objective))},
      {"freeze", config.freeze ? nlohmann::json(config.freeze->trainable_top_layers)
                               : nlohmann::json(nullptr)},
      {"prune_ratio", config.engine.prune_ratio},
      {"max_span_width", config.engine.max_span_width},
      {"pruning_mode",
       config.engine.pruning_mode == PruningMode::kOriginal ? "original" : "reformulated"},
      {"gold_mentions", config.engine.gold_mentions},
      {"emit_singletons", config.engine.emit_singletons
                              ? nlohmann::json(*config.engine.emit_singletons)
                              : nlohmann::json(nullptr)},
      {"max_segment_len", config.engine.max_segment_len},
  };
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

std::size_t select_epoch(std::span<const double> dev_scores, int patience) {
  if (dev_scores.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "no dev scores to select from");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < dev_scores.size(); ++i) {
    if (dev_scores[i] > dev_scores[best]) {
      best = i;
    } else if (i - best >= static_cast<std::size_t>(patience)) {
      break;
    }
  }
  return best;
}

metrics::MetricReport evaluate(const CorefModel& model,
                               const std::vector<Document>& docs,
                               const EngineConfig& config,
                               std::vector<Clustering>* predictions) {
  metrics::Scorer scorer;
  if (predictions) predictions->clear();
  for (const Document& doc : docs) {
    Clustering response = resolve_document(doc, model, config);
    scorer.add(doc.clusters, response);
    if (predictions) predictions->push_back(std::move(response));
  }
  return scorer.report();
}

double corpus_loss(const CorefModel& model, const std::vector<Document>& docs,
                   const EngineConfig& config, Objective objective) {
  // document_loss only writes gradients when asked to, so a scratch copy
  // keeps the caller's model untouched without a const_cast.
  CorefModel scratch = model;
  double total = 0.0;
  for (const Document& doc : docs) {
    total += document_loss(doc, scratch, config, objective, false);
  }
  return total;
}

namespace {

EpochRecord evaluate_epoch(int epoch, double train_loss, const CorefModel& model,
                           const std::vector<Document>& dev_docs,
                           const TrainConfig& config, const TrainHooks& hooks) {
  EpochRecord record;
  record.epoch = epoch;
  record.train_loss = train_loss;
  std::vector<Clustering> preds;
  record.dev_avg_f1 = evaluate(model, dev_docs, config.engine, &preds).avg_f1;
  if (config.record_predictions) record.dev_predictions = std::move(preds);
  if (hooks.test_docs) {
    std::vector<Clustering> test_preds;
    record.test_avg_f1 =
        evaluate(model, *hooks.test_docs, config.engine, &test_preds).avg_f1;
    if (config.record_predictions) record.test_predictions = std::move(test_preds);
  }
  if (config.track_dev_loss) {
    record.dev_loss = corpus_loss(model, dev_docs, config.engine, config.objective);
  }
  return record;
}

}  // namespace

TrainResult train(const std::vector<Document>& train_docs,
                  const std::vector<Document>& dev_docs, const CorefModel& init,
                  const TrainConfig& config, const TrainHooks& hooks) {
  validate(config);
  if (train_docs.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "training set is empty");
  }
  if (dev_docs.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "dev set is empty");
  }
  CorefModel model = init;
  if (config.freeze) {
    model.apply_freeze(*config.freeze);
  } else {
    model.unfreeze_all();
  }
  model.params().zero_grad();
  Optimizer optimizer(model.params(), config.optimizer);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train_docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const std::string hash = config_hash(config, model.config());
  TrainResult result{Checkpoint{model, 0, 0.0, hash}, {}, std::nullopt};
  int best_epoch = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double train_loss = 0.0;
    for (std::size_t i : order) {
      train_loss += document_loss(train_docs[i], model, config.engine,
                                  config.objective, true);
      optimizer.step(model.params());
    }
    EpochRecord record =
        evaluate_epoch(epoch, train_loss, model, dev_docs, config, hooks);
    if (!result.stopped_at) {
      if (best_epoch == 0 || record.dev_avg_f1 > result.best.dev_avg_f1) {
        best_epoch = epoch;
        result.best = Checkpoint{model, epoch, record.dev_avg_f1, hash};
      } else if (epoch - best_epoch >= config.patience) {
        result.stopped_at = epoch;
      }
    }
    if (hooks.on_epoch) hooks.on_epoch(record);
    result.history.push_back(std::move(record));
    if (result.stopped_at && !config.run_all_epochs) break;
  }
  if (best_epoch == 0) {
    // max_epochs == 0: the initialization is the only candidate.
    EpochRecord record = evaluate_epoch(0, 0.0, model, dev_docs, config, hooks);
    result.best = Checkpoint{model, 0, record.dev_avg_f1, hash};
    result.history.push_back(std::move(record));
  }
  return result;
}

CorefModel init_from(const CorefModel& source, const ModelConfig& target) {
  const CorefModel shape(target);
  const std::vector<std::string> bad =
      incompatible_tensors(source.params(), shape.params());
  if (!bad.empty()) {
    std::string list;
    for (const std::string& name : bad) list += (list.empty() ? "" : ", ") + name;
    throw Error(ErrorCategory::kIncompatible, "incompatible tensors: " + list);
  }
  return source;
}

TrainResult continued_train(const CorefModel& source,
                            const std::vector<Document>& target_train,
                            const std::vector<Document>& target_dev,
                            const TrainConfig& config, const TrainHooks& hooks) {
  if (!target_train.empty()) return train(target_train, target_dev, source, config, hooks);
  validate(config);
  if (target_dev.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "dev set is empty");
  }
  EpochRecord record = evaluate_epoch(0, 0.0, source, target_dev, config, hooks);
  TrainResult result{
      Checkpoint{source, 0, record.dev_avg_f1, config_hash(config, source.config())},
      {},
      std::nullopt};
  if (hooks.on_epoch) hooks.on_epoch(record);
  result.history.push_back(std::move(record));
  return result;
}

LossGradCheck check_loss_gradients(const Document& doc, const ModelConfig& model_config,
                                   const EngineConfig& engine, Objective objective,
                                   int warmup_steps, const GradCheckOptions& options) {
  if (warmup_steps < 0) {
    throw Error(ErrorCategory::kInvalidArgument, "warmup_steps must be >= 0");
  }
  validate(doc);
  CorefModel model(model_config);
  OptimizerConfig warm;
  warm.lr_task = 1e-2;
  Optimizer optimizer(model.params(), warm);
  for (int i = 0; i < warmup_steps; ++i) {
    document_loss(doc, model, engine, Objective::kJoint, true);
    optimizer.step(model.params());
  }
  LossGradCheck out;
  LossTrace trace;
  out.loss = document_loss(doc, model, engine, objective, false, &trace);
  out.decisions = trace.decisions.size();
  out.result = grad_check(
      [&](ParamStore&, bool with_grad) {
        return document_loss(doc, model, engine, objective, with_grad);
      },
      model.params(), options);
  return out;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  const bool dev_loss = std::any_of(history.begin(), history.end(),
                                    [](const EpochRecord& r) { return r.dev_loss.has_value(); });
  const bool test = std::any_of(history.begin(), history.end(),
                                [](const EpochRecord& r) { return r.test_avg_f1.has_value(); });
  std::ostringstream out;
  out.precision(17);
  out << "epoch,train_loss,dev_avg_f1";
  if (dev_loss) out << ",dev_loss";
  if (test) out << ",test_avg_f1";
  out << "\n";
  for (const EpochRecord& r : history) {
    out << r.epoch << "," << r.train_loss << "," << r.dev_avg_f1;
    if (dev_loss) out << "," << r.dev_loss.value_or(NAN);
    if (test) out << "," << r.test_avg_f1.value_or(NAN);
    out << "\n";
  }
  return out.str();
}

}  // namespace incoref
