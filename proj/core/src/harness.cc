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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "incoref/error.h"
#include "incoref/metrics.h"

namespace incoref {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs < 1) throw Error(ErrorCategory::kInvalidArgument, "jobs must be >= 1");
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::vector<std::size_t>> nested_subsets(std::size_t pool_size,
                                                     const std::vector<int>& sizes,
                                                     std::uint64_t seed) {
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 0 || static_cast<std::size_t>(sizes[i]) > pool_size) {
      throw Error(ErrorCategory::kInvalidArgument,
                  "train size " + std::to_string(sizes[i]) + " exceeds pool of " +
                      std::to_string(pool_size));
    }
    if (i > 0 && sizes[i] < sizes[i - 1]) {
      throw Error(ErrorCategory::kInvalidArgument, "train sizes must be ascending");
    }
  }
  std::vector<std::size_t> order(pool_size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> out;
  for (int s : sizes) out.emplace_back(order.begin(), order.begin() + s);
  return out;
}

namespace {

std::vector<Document> pick(const std::vector<Document>& pool,
                           const std::vector<std::size_t>& indices) {
  std::vector<Document> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(pool[i]);
  return out;
}

}  // namespace

std::vector<CurveRow> learning_curve(const DataSplit& data, const CurveSpec& spec,
                                     int jobs) {
  validate(spec.train);
  const auto subsets = nested_subsets(data.train.size(), spec.train_sizes, spec.seed);
  std::vector<CurveRow> rows(subsets.size());
  parallel_for(subsets.size(), jobs, [&](std::size_t i) {
    const std::vector<Document> train_docs = pick(data.train, subsets[i]);
    const CorefModel init = spec.source ? *spec.source : CorefModel(spec.model);
    const TrainResult result =
        continued_train(init, train_docs, data.dev, spec.train);
    const metrics::MetricReport test =
        evaluate(result.best.model, data.test, spec.train.engine);
    rows[i] = CurveRow{spec.train_sizes[i], test.avg_f1, test.mention.f1,
                       result.best.epoch, result.best.dev_avg_f1};
  });
  return rows;
}

std::vector<DevAllocRow> dev_allocation_experiment(
    const std::vector<EpochRecord>& history, const std::vector<Document>& dev,
    const DevAllocSpec& spec) {
  if (history.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "empty training history");
  }
  if (spec.num_subsets < 1) {
    throw Error(ErrorCategory::kInvalidArgument, "num_subsets must be >= 1");
  }
  for (const EpochRecord& r : history) {
    if (r.dev_predictions.size() != dev.size()) {
      throw Error(ErrorCategory::kInvalidArgument,
                  "missing cached dev predictions for epoch " + std::to_string(r.epoch));
    }
    if (!r.test_avg_f1) {
      throw Error(ErrorCategory::kInvalidArgument,
                  "missing test score for epoch " + std::to_string(r.epoch));
    }
  }
  for (int s : spec.dev_subset_sizes) {
    if (s < 1 || static_cast<std::size_t>(s) > dev.size()) {
      throw Error(ErrorCategory::kInvalidArgument,
                  "dev subset size " + std::to_string(s) + " outside [1, " +
                      std::to_string(dev.size()) + "]");
    }
  }

  auto subset_scores = [&](const std::vector<std::size_t>& docs) {
    std::vector<double> scores;
    scores.reserve(history.size());
    for (const EpochRecord& r : history) {
      metrics::Scorer scorer;
      for (std::size_t d : docs) scorer.add(dev[d].clusters, r.dev_predictions[d]);
      scores.push_back(scorer.report().avg_f1);
    }
    return scores;
  };

  std::vector<std::size_t> all(dev.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const std::size_t full_choice = select_epoch(subset_scores(all), spec.patience);

  std::mt19937_64 rng(spec.seed);
  std::vector<DevAllocRow> rows;
  for (int size : spec.dev_subset_sizes) {
    DevAllocRow row;
    row.subset_size = size;
    row.num_subsets = spec.num_subsets;
    std::vector<double> test_scores;
    for (int k = 0; k < spec.num_subsets; ++k) {
      std::vector<std::size_t> docs;
      std::sample(all.begin(), all.end(), std::back_inserter(docs), size, rng);
      const std::size_t choice = select_epoch(subset_scores(docs), spec.patience);
      row.selected_epochs.push_back(history[choice].epoch);
      test_scores.push_back(*history[choice].test_avg_f1);
      if (choice == full_choice) ++row.agreement;
    }
    const double n = static_cast<double>(test_scores.size());
    row.mean_test_f1 = std::accumulate(test_scores.begin(), test_scores.end(), 0.0) / n;
    double var = 0.0;
    for (double s : test_scores) var += (s - row.mean_test_f1) * (s - row.mean_test_f1);
    row.std_test_f1 = std::sqrt(var / n);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ForgetRow> forgetting_eval(const CorefModel& source,
                                       const std::vector<Document>& source_test,
                                       const EngineConfig& source_engine,
                                       const DataSplit& target,
                                       const std::vector<int>& sizes,
                                       const TrainConfig& config, std::uint64_t seed,
                                       int jobs) {
  validate(config);
  const auto subsets = nested_subsets(target.train.size(), sizes, seed);
  std::vector<ForgetRow> rows(subsets.size());
  parallel_for(subsets.size(), jobs, [&](std::size_t i) {
    const TrainResult result =
        continued_train(source, pick(target.train, subsets[i]), target.dev, config);
    rows[i] = ForgetRow{sizes[i],
                        evaluate(result.best.model, target.test, config.engine).avg_f1,
                        evaluate(result.best.model, source_test, source_engine).avg_f1};
  });
  return rows;
}

std::vector<FreezeRow> layer_freezing_sweep(const CorefModel& init,
                                            const DataSplit& data,
                                            const std::vector<int>& top_k_values,
                                            const TrainConfig& config, int jobs) {
  validate(config);
  const int layers = init.config().encoder.num_layers;
  for (int k : top_k_values) {
    if (k < 0 || k > layers) {
      throw Error(ErrorCategory::kInvalidArgument,
                  "top_k " + std::to_string(k) + " outside [0, " +
                      std::to_string(layers) + "]");
    }
  }
  std::vector<FreezeRow> rows(top_k_values.size());
  parallel_for(top_k_values.size(), jobs, [&](std::size_t i) {
    TrainConfig run = config;
    run.freeze = FreezeMask{top_k_values[i]};
    const TrainResult result = train(data.train, data.dev, init, run);
    rows[i] = FreezeRow{top_k_values[i],
                        evaluate(result.best.model, data.test, config.engine).avg_f1,
                        result.best.dev_avg_f1, result.best.epoch};
  });
  return rows;
}

namespace {

std::ostringstream csv_stream() {
  std::ostringstream out;
  out.precision(17);
  return out;
}

}  // namespace

std::string curve_csv(const std::vector<CurveRow>& rows) {
  auto out = csv_stream();
  out << "train_size,test_avg_f1,test_mention_f1,best_epoch,dev_avg_f1\n";
  for (const CurveRow& r : rows) {
    out << r.train_size << "," << r.test_avg_f1 << "," << r.test_mention_f1 << ","
        << r.best_epoch << "," << r.dev_avg_f1 << "\n";
  }
  return out.str();
}

std::string dev_alloc_csv(const std::vector<DevAllocRow>& rows) {
  auto out = csv_stream();
  out << "subset_size,mean_test_f1,std_test_f1,agreement,num_subsets\n";
  for (const DevAllocRow& r : rows) {
    out << r.subset_size << "," << r.mean_test_f1 << "," << r.std_test_f1 << ","
        << r.agreement << "," << r.num_subsets << "\n";
  }
  return out.str();
}

std::string forget_csv(const std::vector<ForgetRow>& rows) {
  auto out = csv_stream();
  out << "target_size,target_test_f1,source_test_f1\n";
  for (const ForgetRow& r : rows) {
    out << r.target_size << "," << r.target_test_f1 << "," << r.source_test_f1 << "\n";
  }
  return out.str();
}

std::string freeze_csv(const std::vector<FreezeRow>& rows) {
  auto out = csv_stream();
  out << "top_k,test_avg_f1,dev_avg_f1,best_epoch\n";
  for (const FreezeRow& r : rows) {
    out << r.top_k << "," << r.test_avg_f1 << "," << r.dev_avg_f1 << ","
        << r.best_epoch << "\n";
  }
  return out.str();
}

}  // namespace incoref
