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

#include "incoref/harness.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <set>
#include <stdexcept>

#include "incoref/error.h"
#include "incoref/synth.h"
#include "test_util.h"

namespace incoref {
namespace {

using testing::small_model_config;

std::vector<Document> corpus(int n, std::uint64_t seed) {
  SchemeConfig scheme;
  scheme.num_docs = n;
  scheme.seed = seed;
  scheme.sentences_per_doc = {2, 4};
  scheme.doc_prefix = "h" + std::to_string(seed);
  return synth_corpus(scheme);
}

TrainConfig quick_config(int epochs, int patience) {
  TrainConfig cfg;
  cfg.max_epochs = epochs;
  cfg.patience = patience;
  cfg.optimizer.lr_task = 1e-3;
  cfg.optimizer.lr_encoder = 1e-4;
  return cfg;
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(3, 0, [](std::size_t) {}), Error);
}

TEST(ParallelForTest, RethrowsWorkerFailure) {
  EXPECT_THROW(parallel_for(8, 3,
                            [](std::size_t i) {
                              if (i == 5) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(NestedSubsetsTest, LargerSetsContainSmallerOnes) {
  const auto subsets = nested_subsets(20, {0, 3, 7, 20}, 4);
  ASSERT_EQ(subsets.size(), 4u);
  EXPECT_TRUE(subsets[0].empty());
  for (std::size_t i = 1; i < subsets.size(); ++i) {
    const auto& small = subsets[i - 1];
    const auto& big = subsets[i];
    EXPECT_TRUE(std::equal(small.begin(), small.end(), big.begin()));
  }
  EXPECT_EQ(std::set<std::size_t>(subsets[3].begin(), subsets[3].end()).size(), 20u);
  EXPECT_EQ(nested_subsets(20, {3, 7}, 4)[1], subsets[2]);
}

TEST(NestedSubsetsTest, RejectsBadSizes) {
  EXPECT_THROW(nested_subsets(5, {6}, 1), Error);
  EXPECT_THROW(nested_subsets(5, {3, 2}, 1), Error);
  EXPECT_THROW(nested_subsets(5, {-1}, 1), Error);
}

TEST(LearningCurveTest, ParallelRunsMatchSequential) {
  DataSplit data{corpus(4, 1), corpus(2, 2), corpus(2, 3)};
  CurveSpec spec;
  spec.train_sizes = {0, 2, 4};
  spec.model = small_model_config();
  spec.train = quick_config(3, 2);
  const auto seq = learning_curve(data, spec, 1);
  const auto par = learning_curve(data, spec, 3);
  ASSERT_EQ(seq.size(), 3u);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_EQ(seq[i].train_size, spec.train_sizes[i]);
    EXPECT_EQ(seq[i].test_avg_f1, par[i].test_avg_f1);
    EXPECT_EQ(seq[i].best_epoch, par[i].best_epoch);
  }
  EXPECT_EQ(seq[0].best_epoch, 0);
  EXPECT_EQ(curve_csv(seq).substr(0, curve_csv(seq).find('\n')),
            "train_size,test_avg_f1,test_mention_f1,best_epoch,dev_avg_f1");
}

// A full-length history with cached predictions, as devalloc produces it.
struct CachedRun {
  TrainResult result;
  std::vector<Document> dev;
};

CachedRun cached_run(int epochs, int patience) {
  const auto tr = corpus(3, 4);
  auto dev = corpus(4, 5);
  const auto test = corpus(2, 6);
  TrainConfig cfg = quick_config(epochs, patience);
  cfg.run_all_epochs = true;
  cfg.record_predictions = true;
  TrainHooks hooks;
  hooks.test_docs = &test;
  TrainResult result = train(tr, dev, CorefModel(small_model_config()), cfg, hooks);
  return {std::move(result), std::move(dev)};
}

TEST(DevAllocTest, FullDevSubsetReproducesEarlyStopping) {
  const CachedRun run = cached_run(10, 2);
  DevAllocSpec spec;
  spec.dev_subset_sizes = {1, 2, static_cast<int>(run.dev.size())};
  spec.num_subsets = 20;
  spec.patience = 2;
  const auto rows = dev_allocation_experiment(run.result.history, run.dev, spec);
  ASSERT_EQ(rows.size(), 3u);
  const DevAllocRow& full = rows.back();
  EXPECT_EQ(full.agreement, 20);
  for (int e : full.selected_epochs) EXPECT_EQ(e, run.result.best.epoch);
  EXPECT_DOUBLE_EQ(full.std_test_f1, 0.0);
  for (const DevAllocRow& r : rows) {
    EXPECT_EQ(r.num_subsets, 20);
    EXPECT_EQ(r.selected_epochs.size(), 20u);
    EXPECT_GE(r.agreement, 0);
    EXPECT_LE(r.agreement, 20);
    EXPECT_GE(r.std_test_f1, 0.0);
  }
  EXPECT_EQ(dev_alloc_csv(rows).substr(0, dev_alloc_csv(rows).find('\n')),
            "subset_size,mean_test_f1,std_test_f1,agreement,num_subsets");
}

TEST(DevAllocTest, ConstantScoresGiveZeroSpread) {
  const auto dev = corpus(3, 7);
  std::vector<EpochRecord> history(5);
  for (int e = 0; e < 5; ++e) {
    history[e].epoch = e + 1;
    history[e].test_avg_f1 = 0.1 * (e + 1);
    for (const Document& d : dev) history[e].dev_predictions.push_back(d.clusters);
  }
  DevAllocSpec spec;
  spec.dev_subset_sizes = {1};
  spec.num_subsets = 7;
  spec.patience = 2;
  const auto rows = dev_allocation_experiment(history, dev, spec);
  EXPECT_NEAR(rows[0].std_test_f1, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(rows[0].mean_test_f1, 0.1);
  EXPECT_EQ(rows[0].agreement, 7);
}

TEST(DevAllocTest, RejectsIncompleteHistories) {
  const auto dev = corpus(2, 8);
  DevAllocSpec spec;
  spec.dev_subset_sizes = {1};
  std::vector<EpochRecord> history(1);
  history[0].epoch = 1;
  history[0].test_avg_f1 = 0.5;
  EXPECT_THROW(dev_allocation_experiment(history, dev, spec), Error);  // no predictions
  for (const Document& d : dev) history[0].dev_predictions.push_back(d.clusters);
  history[0].test_avg_f1.reset();
  EXPECT_THROW(dev_allocation_experiment(history, dev, spec), Error);  // no test score
  history[0].test_avg_f1 = 0.5;
  spec.dev_subset_sizes = {3};
  EXPECT_THROW(dev_allocation_experiment(history, dev, spec), Error);  // too large
  EXPECT_THROW(dev_allocation_experiment({}, dev, spec), Error);
}

TEST(ForgettingTest, ZeroTargetDocsKeepsSourceScore) {
  const CorefModel source(small_model_config());
  const auto source_test = corpus(2, 9);
  DataSplit target{corpus(3, 10), corpus(2, 11), corpus(2, 12)};
  const EngineConfig engine;
  const auto rows = forgetting_eval(source, source_test, engine, target, {0, 2},
                                    quick_config(2, 1), 1, 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].target_size, 0);
  EXPECT_EQ(rows[0].source_test_f1, evaluate(source, source_test, engine).avg_f1);
  EXPECT_EQ(rows[0].target_test_f1, evaluate(source, target.test, engine).avg_f1);
  EXPECT_EQ(forget_csv(rows).substr(0, forget_csv(rows).find('\n')),
            "target_size,target_test_f1,source_test_f1");
}

TEST(FreezeSweepTest, RunsEachKAndValidatesRange) {
  const CorefModel init(small_model_config());
  DataSplit data{corpus(2, 13), corpus(1, 14), corpus(1, 15)};
  const TrainConfig cfg = quick_config(2, 1);
  const auto rows = layer_freezing_sweep(init, data, {0, 1, 2}, cfg, 3);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].top_k, static_cast<int>(i));
    EXPECT_GE(rows[i].best_epoch, 1);
  }
  EXPECT_THROW(layer_freezing_sweep(init, data, {3}, cfg, 1), Error);
  EXPECT_EQ(freeze_csv(rows).substr(0, freeze_csv(rows).find('\n')),
            "top_k,test_avg_f1,dev_avg_f1,best_epoch");
}

}  // namespace
}  // namespace incoref
