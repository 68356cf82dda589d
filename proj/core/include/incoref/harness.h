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

#ifndef INCOREF_HARNESS_H_
#define INCOREF_HARNESS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "incoref/document.h"
#include "incoref/model.h"
#include "incoref/training.h"

namespace incoref {

struct DataSplit {
  std::vector<Document> train;
  std::vector<Document> dev;
  std::vector<Document> test;
};

// Runs fn(0) .. fn(n - 1) on up to `jobs` threads. The first exception is
// rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Training pools for a learning curve: a seeded permutation of the pool,
// cut at each size, so every set is a prefix of the next larger one.
std::vector<std::vector<std::size_t>> nested_subsets(std::size_t pool_size,
                                                     const std::vector<int>& sizes,
                                                     std::uint64_t seed);

struct CurveSpec {
  std::vector<int> train_sizes;  // ascending
  // Continued training from this model when set, otherwise from scratch.
  std::optional<CorefModel> source;
  ModelConfig model;  // scratch initialization
  TrainConfig train;
  std::uint64_t seed = 1;  // subset order
};

struct CurveRow {
  int train_size = 0;
  double test_avg_f1 = 0.0;
  double test_mention_f1 = 0.0;
  int best_epoch = 0;
  double dev_avg_f1 = 0.0;
};

std::vector<CurveRow> learning_curve(const DataSplit& data, const CurveSpec& spec,
                                     int jobs = 1);

struct DevAllocSpec {
  std::vector<int> dev_subset_sizes;
  int num_subsets = 20;
  int patience = 10;
  std::uint64_t seed = 1;
};

struct DevAllocRow {
  int subset_size = 0;
  double mean_test_f1 = 0.0;
  double std_test_f1 = 0.0;  // population standard deviation
  // Subsets whose post-hoc selection matches the full dev set's.
  int agreement = 0;
  int num_subsets = 0;
  std::vector<int> selected_epochs;
};

// Post-hoc early stopping on sampled dev subsets. `history` must carry
// per-epoch dev predictions for every document of `dev` and the test score
// of every epoch (train with record_predictions, run_all_epochs and a test
// set). Documents within a subset are distinct; subsets are drawn
// independently of each other.
std::vector<DevAllocRow> dev_allocation_experiment(
    const std::vector<EpochRecord>& history, const std::vector<Document>& dev,
    const DevAllocSpec& spec);

struct ForgetRow {
  int target_size = 0;
  double target_test_f1 = 0.0;
  double source_test_f1 = 0.0;
};

// Continued training from `source` on nested target subsets (same subsets as
// learning_curve with the same seed), scoring the target test set with
// config.engine and the source test set with `source_engine`.
std::vector<ForgetRow> forgetting_eval(const CorefModel& source,
                                       const std::vector<Document>& source_test,
                                       const EngineConfig& source_engine,
                                       const DataSplit& target,
                                       const std::vector<int>& sizes,
                                       const TrainConfig& config, std::uint64_t seed,
                                       int jobs = 1);

struct FreezeRow {
  int top_k = 0;
  double test_avg_f1 = 0.0;
  double dev_avg_f1 = 0.0;
  int best_epoch = 0;
};

std::vector<FreezeRow> layer_freezing_sweep(const CorefModel& init,
                                            const DataSplit& data,
                                            const std::vector<int>& top_k_values,
                                            const TrainConfig& config, int jobs = 1);

std::string curve_csv(const std::vector<CurveRow>& rows);
std::string dev_alloc_csv(const std::vector<DevAllocRow>& rows);
std::string forget_csv(const std::vector<ForgetRow>& rows);
std::string freeze_csv(const std::vector<FreezeRow>& rows);

}  // namespace incoref

#endif  // INCOREF_HARNESS_H_
