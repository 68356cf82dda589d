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

#include "commands.h"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "incoref/checkpoint.h"
#include "incoref/corpus.h"
#include "incoref/error.h"
#include "incoref/harness.h"
#include "incoref/metrics.h"
#include "incoref/synth.h"
#include "incoref/training.h"
#include "json.hpp"
#include "run_config.h"
#include "run_dir.h"

namespace incoref::cli {
namespace {

enum class Format { kConll, kJsonl };

Format format_of(const std::string& path) {
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".conll" || ext == ".txt" || ext == ".gold_conll") return Format::kConll;
  if (ext == ".jsonl" || ext == ".json") return Format::kJsonl;
  throw Error(ErrorCategory::kInvalidArgument,
              "cannot infer format of " + path + " (use .conll or .jsonl)");
}

Format format_named(const std::string& name) {
  if (name == "conll") return Format::kConll;
  if (name == "jsonl") return Format::kJsonl;
  throw Error(ErrorCategory::kInvalidArgument, "unknown format " + name);
}

std::vector<Document> parse_docs(const std::string& text, Format f) {
  return f == Format::kConll ? parse_conll(text) : parse_jsonl(text);
}

std::string write_docs(const std::vector<Document>& docs, Format f) {
  return f == Format::kConll ? write_conll(docs) : write_jsonl(docs);
}

std::vector<Document> load_docs(const std::string& path) {
  return parse_docs(read_file(path), format_of(path));
}

std::vector<Document> with_clusters(const std::vector<Document>& docs,
                                    const std::vector<Clustering>& clusters) {
  std::vector<Document> out = docs;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].clusters = clusters[i];
  return out;
}

// Options shared by every subcommand that reads a RunConfig.
struct ConfigOptions {
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key=value configuration file")
        ->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "override one key, e.g. train.max_epochs=20");
    app->add_option("--seed", seed, "global seed (default: COREF_SEED or 1)");
  }

  RunConfig load() const {
    RunConfig config;
    if (!config_file.empty()) config.load_file(config_file);
    for (const std::string& o : overrides) config.apply_override(o);
    if (seed) config.set("seed", std::to_string(*seed));
    return config;
  }
};

struct DataOptions {
  std::string train, dev, test, corpus;
  std::optional<int> folds, fold;

  void attach(CLI::App* app, bool need_test) {
    app->add_option("--train", train, "training documents")->check(CLI::ExistingFile);
    app->add_option("--dev", dev, "development documents")->check(CLI::ExistingFile);
    app->add_option("--test", test, need_test ? "test documents (required)"
                                              : "test documents")
        ->check(CLI::ExistingFile);
    app->add_option("--corpus", corpus,
                    "single corpus split by k-fold (with --folds and --fold)")
        ->check(CLI::ExistingFile);
    app->add_option("--folds", folds, "number of folds for --corpus (data.folds)");
    app->add_option("--fold", fold, "fold index for --corpus (data.fold)");
  }

  void apply(RunConfig& config) const {
    if (folds) config.set("data.folds", std::to_string(*folds));
    if (fold) config.set("data.fold", std::to_string(*fold));
  }

  DataSplit load(const RunConfig& config, RunDir& run, bool need_test) const {
    DataSplit split;
    if (!corpus.empty()) {
      if (!train.empty() || !dev.empty() || !test.empty()) {
        throw Error(ErrorCategory::kInvalidArgument,
                    "--corpus excludes --train/--dev/--test");
      }
      run.add_input(corpus);
      const std::vector<Document> docs = load_docs(corpus);
      const int k = config.get_int("data.folds");
      const int i = config.get_int("data.fold");
      const std::vector<FoldSpec> folds = make_folds(docs, k, config.seed());
      if (i < 0 || i >= k) {
        throw Error(ErrorCategory::kInvalidArgument,
                    "fold " + std::to_string(i) + " outside [0, " + std::to_string(k) + ")");
      }
      split.train = select_docs(docs, folds[i].train_ids);
      split.dev = select_docs(docs, folds[i].dev_ids);
      split.test = select_docs(docs, folds[i].test_ids);
      return split;
    }
    if (dev.empty()) throw Error(ErrorCategory::kInvalidArgument, "--dev is required");
    if (need_test && test.empty()) {
      throw Error(ErrorCategory::kInvalidArgument, "--test is required");
    }
    if (!train.empty()) {
      run.add_input(train);
      split.train = load_docs(train);
    }
    run.add_input(dev);
    split.dev = load_docs(dev);
    if (!test.empty()) {
      run.add_input(test);
      split.test = load_docs(test);
    }
    return split;
  }
};

void print_report(const metrics::MetricReport& r, const char* label) {
  auto line = [&](const char* name, const metrics::PRF& p) {
    std::printf("%s %-14s P %.4f  R %.4f  F1 %.4f%s\n", label, name, p.precision,
                p.recall, p.f1, p.degenerate ? "  (degenerate)" : "");
  };
  line("muc", r.muc);
  line("b_cubed", r.b_cubed);
  line("ceaf_phi4", r.ceaf_phi4);
  line("mention", r.mention);
  line("exact_cluster", r.exact_cluster);
  std::printf("%s %-14s %.4f\n", label, "avg_f1", r.avg_f1);
}

std::string epoch_file(const char* prefix, int epoch) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "predictions/%s_epoch_%03d.jsonl", prefix, epoch);
  return buf;
}

// --------------------------------------------------------------------------

int cmd_convert(const std::string& input, const std::optional<std::string>& from,
                const std::vector<std::string>& to, const std::string& output) {
  Format f = from ? format_named(*from) : format_of(input);
  std::vector<Document> docs = parse_docs(read_file(input), f);
  std::string bytes;
  for (std::size_t i = 0; i < to.size(); ++i) {
    f = format_named(to[i]);
    bytes = write_docs(docs, f);
    if (i + 1 < to.size()) docs = parse_docs(bytes, f);
  }
  if (output.empty() || output == "-") {
    std::cout << bytes;
  } else {
    write_file(output, bytes);
    std::fprintf(stderr, "wrote %zu documents to %s\n", docs.size(), output.c_str());
  }
  return 0;
}

int cmd_synth(const RunConfig& config, const std::string& output) {
  const std::vector<Document> docs = synth_corpus(config.scheme_config());
  write_file(output, write_docs(docs, format_of(output)));
  std::size_t clusters = 0, mentions = 0;
  for (const Document& d : docs) {
    clusters += d.clusters.size();
    mentions += all_mentions(d.clusters).size();
  }
  std::printf("wrote %zu documents, %zu clusters, %zu mentions to %s\n", docs.size(),
              clusters, mentions, output.c_str());
  return 0;
}

int cmd_score(const std::string& key_path, const std::string& response_path,
              const std::string& json_out) {
  const std::vector<Document> key = load_docs(key_path);
  const std::vector<Document> response = load_docs(response_path);
  std::map<std::string, const Document*> by_id;
  for (const Document& d : response) {
    if (!by_id.emplace(d.doc_id, &d).second) {
      throw Error(ErrorCategory::kInvalidArgument,
                  "duplicate response document " + d.doc_id);
    }
  }
  metrics::Scorer scorer;
  int missing = 0;
  for (const Document& d : key) {
    auto it = by_id.find(d.doc_id);
    if (it == by_id.end()) {
      ++missing;
      scorer.add(d.clusters, {});
      continue;
    }
    scorer.add(d.clusters, it->second->clusters);
    by_id.erase(it);
  }
  if (!by_id.empty()) {
    throw Error(ErrorCategory::kInvalidArgument,
                "response document " + by_id.begin()->first + " is not in the key");
  }
  metrics::MetricReport report = scorer.report();
  if (missing > 0) {
    report.flags.push_back(std::to_string(missing) + " key documents without response");
  }
  print_report(report, "score");
  for (const std::string& f : report.flags) std::printf("flag %s\n", f.c_str());
  if (!json_out.empty()) write_file(json_out, metrics::to_json(report) + "\n");
  return 0;
}

void write_training_outputs(RunDir& run, const TrainResult& result,
                            const DataSplit& data, const TrainConfig& config) {
  save_checkpoint(run.path("model.ckpt"), result.best.model, nullptr,
                  nlohmann::json{{"epoch", result.best.epoch},
                                 {"dev_avg_f1", result.best.dev_avg_f1},
                                 {"config_hash", result.best.config_hash}}
                      .dump());
  run.add_output("model.ckpt");
  run.add_output("model.ckpt.json");
  run.write_output("history.csv", history_csv(result.history));
  std::printf("best epoch %d  dev avg_f1 %.4f  (%zu epochs run)\n", result.best.epoch,
              result.best.dev_avg_f1, result.history.size());
  if (!data.test.empty()) {
    const metrics::MetricReport test = evaluate(result.best.model, data.test, config.engine);
    print_report(test, "test");
    run.write_output("test_metrics.json", metrics::to_json(test) + "\n");
  }
}

void cache_predictions(RunDir& run, const TrainResult& result, const DataSplit& data) {
  std::filesystem::create_directories(run.path("predictions"));
  for (const EpochRecord& r : result.history) {
    run.write_output(epoch_file("dev", r.epoch),
                     write_jsonl(with_clusters(data.dev, r.dev_predictions)));
    if (!r.test_predictions.empty()) {
      run.write_output(epoch_file("test", r.epoch),
                       write_jsonl(with_clusters(data.test, r.test_predictions)));
    }
  }
}

int cmd_train(RunConfig& config, const DataOptions& data_opts, const std::string& out,
              const std::string& source, bool cache, const std::vector<std::string>& argv,
              const char* command) {
  data_opts.apply(config);
  RunDir run(out, command, argv);
  const DataSplit data = data_opts.load(config, run, false);
  TrainConfig tc = config.train_config();
  tc.record_predictions = cache;
  TrainHooks hooks;
  if (cache && !data.test.empty()) hooks.test_docs = &data.test;
  hooks.on_epoch = [](const EpochRecord& r) {
    std::printf("epoch %3d  train_loss %.4f  dev avg_f1 %.4f\n", r.epoch, r.train_loss,
                r.dev_avg_f1);
    std::fflush(stdout);
  };
  TrainResult result = [&] {
    if (source.empty()) {
      if (data.train.empty()) throw Error(ErrorCategory::kInvalidArgument, "--train is required");
      return train(data.train, data.dev, CorefModel(config.model_config()), tc, hooks);
    }
    run.add_input(source);
    const CorefModel init = init_from(load_checkpoint(source).model, config.model_config());
    return continued_train(init, data.train, data.dev, tc, hooks);
  }();
  write_training_outputs(run, result, data, tc);
  if (cache) cache_predictions(run, result, data);
  run.finish(config);
  return 0;
}

int cmd_resolve(const RunConfig& config, const std::string& model_path,
                const std::string& input, const std::string& output, bool score) {
  const LoadedCheckpoint ckpt = load_checkpoint(model_path);
  const EngineConfig engine = config.engine_config();
  const std::vector<Document> docs = load_docs(input);
  std::vector<Clustering> predictions;
  const metrics::MetricReport report = evaluate(ckpt.model, docs, engine, &predictions);
  const std::vector<Document> out = with_clusters(docs, predictions);
  write_file(output, write_docs(out, format_of(output)));
  std::size_t clusters = 0;
  for (const Clustering& c : predictions) clusters += c.size();
  std::printf("resolved %zu documents, %zu clusters -> %s\n", docs.size(), clusters,
              output.c_str());
  if (score) print_report(report, "gold");
  return 0;
}

std::optional<CorefModel> maybe_checkpoint(const std::string& path, const RunConfig& config,
                                           RunDir& run) {
  if (path.empty()) return std::nullopt;
  run.add_input(path);
  return init_from(load_checkpoint(path).model, config.model_config());
}

int cmd_curve(RunConfig& config, const DataOptions& data_opts, const std::string& out,
              const std::string& source, int jobs, const std::vector<std::string>& argv) {
  data_opts.apply(config);
  RunDir run(out, "curve", argv);
  const DataSplit data = data_opts.load(config, run, true);
  CurveSpec spec;
  spec.train_sizes = config.get_int_list("experiment.train_sizes");
  if (spec.train_sizes.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "experiment.train_sizes is empty");
  }
  spec.source = maybe_checkpoint(source, config, run);
  spec.model = config.model_config();
  spec.train = config.train_config();
  spec.seed = config.seed();
  const std::vector<CurveRow> rows = learning_curve(data, spec, jobs);
  for (const CurveRow& r : rows) {
    std::printf("train_size %4d  test avg_f1 %.4f  mention_f1 %.4f\n", r.train_size,
                r.test_avg_f1, r.test_mention_f1);
  }
  run.write_output("curve.csv", curve_csv(rows));
  run.finish(config);
  return 0;
}

// Rebuilds a history from a directory written by `devalloc` or `train
// --cache-predictions`.
std::vector<EpochRecord> load_cached_history(const std::string& dir,
                                             const std::vector<Document>& dev,
                                             const std::vector<Document>& test) {
  std::vector<EpochRecord> history;
  for (int epoch = 1;; ++epoch) {
    const std::string dev_path = (std::filesystem::path(dir) / epoch_file("dev", epoch)).string();
    if (!std::filesystem::exists(dev_path)) break;
    EpochRecord r;
    r.epoch = epoch;
    for (const Document& d : parse_jsonl(read_file(dev_path))) {
      r.dev_predictions.push_back(d.clusters);
    }
    const std::string test_path =
        (std::filesystem::path(dir) / epoch_file("test", epoch)).string();
    if (std::filesystem::exists(test_path)) {
      metrics::Scorer scorer;
      const std::vector<Document> preds = parse_jsonl(read_file(test_path));
      if (preds.size() != test.size()) {
        throw Error(ErrorCategory::kInvalidArgument, "cached test predictions do not match --test");
      }
      for (std::size_t i = 0; i < preds.size(); ++i) scorer.add(test[i].clusters, preds[i].clusters);
      r.test_avg_f1 = scorer.report().avg_f1;
    }
    if (r.dev_predictions.size() != dev.size()) {
      throw Error(ErrorCategory::kInvalidArgument, "cached dev predictions do not match --dev");
    }
    history.push_back(std::move(r));
  }
  if (history.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "no cached predictions under " + dir);
  }
  return history;
}

int cmd_devalloc(RunConfig& config, const DataOptions& data_opts, const std::string& out,
                 const std::string& from, const std::vector<std::string>& argv) {
  data_opts.apply(config);
  RunDir run(out, "devalloc", argv);
  const DataSplit data = data_opts.load(config, run, true);
  const TrainConfig base = config.train_config();
  std::vector<EpochRecord> history;
  if (!from.empty()) {
    history = load_cached_history(from, data.dev, data.test);
  } else {
    if (data.train.empty()) throw Error(ErrorCategory::kInvalidArgument, "--train is required");
    TrainConfig tc = base;
    tc.run_all_epochs = true;
    tc.record_predictions = true;
    TrainHooks hooks;
    hooks.test_docs = &data.test;
    TrainResult result = train(data.train, data.dev, CorefModel(config.model_config()), tc, hooks);
    std::printf("full dev selection: epoch %d (dev avg_f1 %.4f)\n", result.best.epoch,
                result.best.dev_avg_f1);
    cache_predictions(run, result, data);
    run.write_output("history.csv", history_csv(result.history));
    history = std::move(result.history);
  }
  DevAllocSpec spec;
  spec.dev_subset_sizes = config.get_int_list("experiment.dev_subset_sizes");
  if (spec.dev_subset_sizes.empty()) {
    spec.dev_subset_sizes.push_back(static_cast<int>(data.dev.size()));
  }
  spec.num_subsets = config.get_int("experiment.num_subsets");
  spec.patience = base.patience;
  spec.seed = config.seed();
  const std::vector<DevAllocRow> rows = dev_allocation_experiment(history, data.dev, spec);
  for (const DevAllocRow& r : rows) {
    std::printf("dev_size %4d  test avg_f1 %.4f +- %.4f  agreement %d/%d\n", r.subset_size,
                r.mean_test_f1, r.std_test_f1, r.agreement, r.num_subsets);
  }
  run.write_output("devalloc.csv", dev_alloc_csv(rows));
  run.finish(config);
  return 0;
}

int cmd_forget(RunConfig& config, const DataOptions& data_opts, const std::string& out,
               const std::string& source, const std::string& source_test, int jobs,
               const std::vector<std::string>& argv) {
  data_opts.apply(config);
  RunDir run(out, "forget", argv);
  const DataSplit data = data_opts.load(config, run, true);
  run.add_input(source);
  run.add_input(source_test);
  const CorefModel init = init_from(load_checkpoint(source).model, config.model_config());
  std::vector<int> sizes = config.get_int_list("experiment.train_sizes");
  if (sizes.empty()) throw Error(ErrorCategory::kInvalidArgument, "experiment.train_sizes is empty");
  const std::vector<ForgetRow> rows =
      forgetting_eval(init, load_docs(source_test), config.source_engine_config(), data,
                      sizes, config.train_config(), config.seed(), jobs);
  for (const ForgetRow& r : rows) {
    std::printf("target_size %4d  target avg_f1 %.4f  source avg_f1 %.4f\n", r.target_size,
                r.target_test_f1, r.source_test_f1);
  }
  run.write_output("forget.csv", forget_csv(rows));
  run.finish(config);
  return 0;
}

int cmd_freeze_sweep(RunConfig& config, const DataOptions& data_opts, const std::string& out,
                     const std::string& init_path, int jobs,
                     const std::vector<std::string>& argv) {
  data_opts.apply(config);
  RunDir run(out, "freeze-sweep", argv);
  const DataSplit data = data_opts.load(config, run, true);
  if (data.train.empty()) throw Error(ErrorCategory::kInvalidArgument, "--train is required");
  std::optional<CorefModel> init = maybe_checkpoint(init_path, config, run);
  if (!init) init.emplace(config.model_config());
  std::vector<int> top_k = config.get_int_list("experiment.top_k");
  if (top_k.empty()) {
    const int layers = init->config().encoder.num_layers;
    top_k = {0, layers / 2, layers};
  }
  const std::vector<FreezeRow> rows =
      layer_freezing_sweep(*init, data, top_k, config.train_config(), jobs);
  for (const FreezeRow& r : rows) {
    std::printf("top_k %2d  test avg_f1 %.4f  dev avg_f1 %.4f  best epoch %d\n", r.top_k,
                r.test_avg_f1, r.dev_avg_f1, r.best_epoch);
  }
  run.write_output("freeze.csv", freeze_csv(rows));
  run.finish(config);
  return 0;
}

int cmd_gradcheck(const RunConfig& config, const std::string& objective,
                  const std::string& input, int warmup, int samples, double tolerance) {
  const Document doc = input.empty() ? tiny_document() : load_docs(input).at(0);
  GradCheckOptions options;
  options.min_total = static_cast<std::size_t>(samples);
  options.seed = config.seed();
  const LossGradCheck check =
      check_loss_gradients(doc, config.model_config(), config.engine_config(),
                           objective_from_name(objective), warmup, options);
  std::printf("objective %s  document %s  loss %.6f  decisions %zu\n", objective.c_str(),
              doc.doc_id.c_str(), check.loss, check.decisions);
  std::printf("checked %zu scalars  max_relative_error %.3e  max_absolute_error %.3e  "
              "worst %s[%zu]\n",
              check.result.checked, check.result.max_relative_error,
              check.result.max_absolute_error, check.result.worst_param.c_str(),
              check.result.worst_index);
  if (!(check.result.max_relative_error < tolerance)) {
    throw Error(ErrorCategory::kNumeric, "max relative error " +
                                             std::to_string(check.result.max_relative_error) +
                                             " exceeds tolerance " + std::to_string(tolerance));
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"incoref: incremental coreference toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand help for every subcommand");
  const std::vector<std::string> args(argv, argv + argc);

  // convert
  auto* convert = app.add_subcommand("convert", "convert between CoNLL and JSONL");
  std::string convert_in, convert_out;
  std::optional<std::string> convert_from;
  std::vector<std::string> convert_to;
  convert->add_option("input", convert_in, "input file")->required()->check(CLI::ExistingFile);
  convert->add_option("--from", convert_from, "input format (default: by extension)")
      ->check(CLI::IsMember({"conll", "jsonl"}));
  convert->add_option("--to", convert_to, "output format; repeat to chain conversions")
      ->required()
      ->check(CLI::IsMember({"conll", "jsonl"}));
  convert->add_option("-o,--output", convert_out, "output file (default: stdout)");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  ConfigOptions synth_cfg;
  synth_cfg.attach(synth);
  std::string synth_out;
  std::optional<int> synth_docs;
  std::optional<std::string> synth_types;
  bool synth_no_singletons = false;
  synth->add_option("-o,--output", synth_out, "output file (.conll or .jsonl)")->required();
  synth->add_option("--num-docs", synth_docs, "documents to generate (synth.num_docs)");
  synth->add_flag("--no-singletons", synth_no_singletons,
                  "leave singleton entities unannotated (synth.annotate_singletons=false)");
  synth->add_option("--types", synth_types,
                    "annotated entity types, e.g. PER,LOC (synth.entity_types)");

  // score
  auto* score = app.add_subcommand("score", "score a response against a key");
  std::string score_key, score_response, score_json;
  score->add_option("key", score_key, "gold documents")->required()->check(CLI::ExistingFile);
  score->add_option("response", score_response, "predicted documents")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--json", score_json, "also write the report as JSON");

  // train / transfer
  auto* train_cmd = app.add_subcommand("train", "train a model from scratch");
  auto* transfer = app.add_subcommand("transfer", "continued training from a checkpoint");
  ConfigOptions train_cfg, transfer_cfg;
  DataOptions train_data, transfer_data;
  std::string train_out, transfer_out, transfer_source;
  bool train_cache = false, transfer_cache = false;
  for (auto [cmd, cfg, data, out, cache] :
       {std::tuple{train_cmd, &train_cfg, &train_data, &train_out, &train_cache},
        std::tuple{transfer, &transfer_cfg, &transfer_data, &transfer_out, &transfer_cache}}) {
    cfg->attach(cmd);
    data->attach(cmd, false);
    cmd->add_option("--out", *out, "run directory")->required();
    cmd->add_flag("--cache-predictions", *cache,
                  "write per-epoch dev (and test) predictions under predictions/");
  }
  transfer->add_option("--source", transfer_source, "source checkpoint")
      ->required()
      ->check(CLI::ExistingFile);

  // resolve
  auto* resolve = app.add_subcommand("resolve", "predict clusters with a trained model");
  ConfigOptions resolve_cfg;
  resolve_cfg.attach(resolve);
  std::string resolve_model, resolve_in, resolve_out;
  bool resolve_score = false;
  resolve->add_option("--model", resolve_model, "checkpoint")->required()->check(CLI::ExistingFile);
  resolve->add_option("input", resolve_in, "documents to resolve")
      ->required()
      ->check(CLI::ExistingFile);
  resolve->add_option("-o,--output", resolve_out, "predictions (.conll or .jsonl)")->required();
  resolve->add_flag("--score", resolve_score, "score predictions against the input clusters");

  // curve
  auto* curve = app.add_subcommand("curve", "learning curve over nested training subsets");
  ConfigOptions curve_cfg;
  DataOptions curve_data;
  std::string curve_out, curve_source;
  std::optional<std::string> curve_sizes;
  int curve_jobs = 1;
  curve_cfg.attach(curve);
  curve_data.attach(curve, true);
  curve->add_option("--out", curve_out, "run directory")->required();
  curve->add_option("--sizes", curve_sizes, "train sizes, e.g. 0,5,10 (experiment.train_sizes)");
  curve->add_option("--source", curve_source, "continue from this checkpoint instead of scratch")
      ->check(CLI::ExistingFile);
  curve->add_option("--jobs", curve_jobs, "parallel runs")->check(CLI::PositiveNumber);

  // devalloc
  auto* devalloc = app.add_subcommand("devalloc", "post-hoc early stopping on dev subsets");
  ConfigOptions devalloc_cfg;
  DataOptions devalloc_data;
  std::string devalloc_out, devalloc_from;
  std::optional<std::string> devalloc_sizes;
  std::optional<int> devalloc_subsets;
  devalloc_cfg.attach(devalloc);
  devalloc_data.attach(devalloc, true);
  devalloc->add_option("--out", devalloc_out, "run directory")->required();
  devalloc->add_option("--subset-sizes", devalloc_sizes,
                       "dev subset sizes (experiment.dev_subset_sizes)");
  devalloc->add_option("--num-subsets", devalloc_subsets,
                       "subsets per size (experiment.num_subsets)");
  devalloc->add_option("--from", devalloc_from,
                       "reuse cached predictions from an earlier run directory")
      ->check(CLI::ExistingDirectory);

  // forget
  auto* forget = app.add_subcommand("forget", "source-side forgetting under continued training");
  ConfigOptions forget_cfg;
  DataOptions forget_data;
  std::string forget_out, forget_source, forget_source_test;
  std::optional<std::string> forget_sizes;
  int forget_jobs = 1;
  forget_cfg.attach(forget);
  forget_data.attach(forget, true);
  forget->add_option("--out", forget_out, "run directory")->required();
  forget->add_option("--source", forget_source, "source checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  forget->add_option("--source-test", forget_source_test, "source test documents")
      ->required()
      ->check(CLI::ExistingFile);
  forget->add_option("--sizes", forget_sizes, "target train sizes (experiment.train_sizes)");
  forget->add_option("--jobs", forget_jobs, "parallel runs")->check(CLI::PositiveNumber);

  // freeze-sweep
  auto* freeze = app.add_subcommand("freeze-sweep", "train with only the top-k encoder layers");
  ConfigOptions freeze_cfg;
  DataOptions freeze_data;
  std::string freeze_out, freeze_init;
  std::optional<std::string> freeze_top_k;
  int freeze_jobs = 1;
  freeze_cfg.attach(freeze);
  freeze_data.attach(freeze, true);
  freeze->add_option("--out", freeze_out, "run directory")->required();
  freeze->add_option("--init", freeze_init, "initial checkpoint (default: scratch)")
      ->check(CLI::ExistingFile);
  freeze->add_option("--top-k", freeze_top_k, "values of k, e.g. 0,3,6 (experiment.top_k)");
  freeze->add_option("--jobs", freeze_jobs, "parallel runs")->check(CLI::PositiveNumber);

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of a loss");
  ConfigOptions gradcheck_cfg;
  gradcheck_cfg.attach(gradcheck);
  std::string gc_objective = "joint", gc_input;
  int gc_warmup = 30, gc_samples = 200;
  double gc_tolerance = 1e-4;
  gradcheck->add_option("--objective", gc_objective, "joint or antecedent")
      ->check(CLI::IsMember({"joint", "antecedent", "joint_singleton", "antecedent_only"}));
  gradcheck->add_option("--input", gc_input, "document file (default: bundled tiny document)")
      ->check(CLI::ExistingFile);
  gradcheck->add_option("--warmup", gc_warmup, "teacher-forced warm-up steps before checking");
  gradcheck->add_option("--samples", gc_samples, "minimum scalars to check");
  gradcheck->add_option("--tolerance", gc_tolerance, "maximum accepted relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "usage_error: %s\n", e.what());
    return 2;
  }

  try {
    if (convert->parsed()) return cmd_convert(convert_in, convert_from, convert_to, convert_out);
    if (synth->parsed()) {
      RunConfig config = synth_cfg.load();
      if (synth_docs) config.set("synth.num_docs", std::to_string(*synth_docs));
      if (synth_no_singletons) config.set("synth.annotate_singletons", "false");
      if (synth_types) config.set("synth.entity_types", *synth_types);
      return cmd_synth(config, synth_out);
    }
    if (score->parsed()) return cmd_score(score_key, score_response, score_json);
    if (train_cmd->parsed()) {
      RunConfig config = train_cfg.load();
      return cmd_train(config, train_data, train_out, "", train_cache, args, "train");
    }
    if (transfer->parsed()) {
      RunConfig config = transfer_cfg.load();
      return cmd_train(config, transfer_data, transfer_out, transfer_source, transfer_cache,
                       args, "transfer");
    }
    if (resolve->parsed()) {
      return cmd_resolve(resolve_cfg.load(), resolve_model, resolve_in, resolve_out,
                         resolve_score);
    }
    if (curve->parsed()) {
      RunConfig config = curve_cfg.load();
      if (curve_sizes) config.set("experiment.train_sizes", *curve_sizes);
      return cmd_curve(config, curve_data, curve_out, curve_source, curve_jobs, args);
    }
    if (devalloc->parsed()) {
      RunConfig config = devalloc_cfg.load();
      if (devalloc_sizes) config.set("experiment.dev_subset_sizes", *devalloc_sizes);
      if (devalloc_subsets) config.set("experiment.num_subsets", std::to_string(*devalloc_subsets));
      return cmd_devalloc(config, devalloc_data, devalloc_out, devalloc_from, args);
    }
    if (forget->parsed()) {
      RunConfig config = forget_cfg.load();
      if (forget_sizes) config.set("experiment.train_sizes", *forget_sizes);
      return cmd_forget(config, forget_data, forget_out, forget_source, forget_source_test,
                        forget_jobs, args);
    }
    if (freeze->parsed()) {
      RunConfig config = freeze_cfg.load();
      if (freeze_top_k) config.set("experiment.top_k", *freeze_top_k);
      return cmd_freeze_sweep(config, freeze_data, freeze_out, freeze_init, freeze_jobs, args);
    }
    if (gradcheck->parsed()) {
      return cmd_gradcheck(gradcheck_cfg.load(), gc_objective, gc_input, gc_warmup, gc_samples,
                           gc_tolerance);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "%s: %s\n", std::string(category_name(e.category())).c_str(),
                 e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal_error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace incoref::cli
