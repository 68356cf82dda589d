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

// Acceptance runner. Each criterion prints one PASS/FAIL line with the
// measured values; the exit status is nonzero if any criterion fails.
// Optional arguments restrict the run to the listed criterion numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "incoref/corpus.h"
#include "incoref/engine.h"
#include "incoref/harness.h"
#include "incoref/metrics.h"
#include "incoref/synth.h"
#include "incoref/training.h"
#include "metric_oracles.h"
#include "test_util.h"

namespace incoref {
namespace {

using metrics::PRF;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: no runtime bound
  std::function<Outcome()> run;
};

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

// --- 1 ---------------------------------------------------------------------

Outcome metric_oracles() {
  std::mt19937_64 rng(20261016);
  std::uniform_int_distribution<int> size(1, 8);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto pool = testing::mention_pool(size(rng));
    const Clustering key = testing::random_clustering(pool, 7, rng);
    const Clustering response = testing::random_clustering(pool, 7, rng);
    const std::pair<PRF, testing::OraclePR> pairs[] = {
        {metrics::muc(key, response), testing::muc_oracle(key, response)},
        {metrics::b_cubed(key, response), testing::b_cubed_oracle(key, response)},
        {metrics::ceaf_phi4(key, response), testing::ceaf_oracle(key, response)}};
    for (const auto& [got, want] : pairs) {
      worst = std::max({worst, std::abs(got.precision - want.precision),
                        std::abs(got.recall - want.recall)});
    }
  }
  return {worst <= 1e-12, fmt("500 trials, max abs diff %.3g", worst)};
}

// --- 2 ---------------------------------------------------------------------

Outcome worked_case() {
  const Clustering key{{{0, 0}, {1, 1}, {2, 2}}};
  const Clustering response{{{0, 0}, {1, 1}}, {{2, 2}}};
  const PRF m = metrics::muc(key, response);
  const PRF b = metrics::b_cubed(key, response);
  const PRF c = metrics::ceaf_phi4(key, response);
  const double err = std::max({std::abs(m.f1 - 2.0 / 3.0), std::abs(b.precision - 1.0),
                               std::abs(b.recall - 5.0 / 9.0), std::abs(c.recall - 0.8),
                               std::abs(c.precision - 0.4)});
  return {err <= 1e-12, fmt("MUC F %.6f  B3 P %.6f R %.6f  CEAF R %.6f", m.f1, b.precision,
                            b.recall, c.recall) +
                            fmt(" P %.6f  max err %.3g", c.precision, err)};
}

// --- 3 ---------------------------------------------------------------------

Outcome gradients() {
  GradCheckOptions options;
  options.step = 1e-5;
  options.min_total = 200;
  Outcome out{true, ""};
  for (Objective obj : {Objective::kJoint, Objective::kAntecedent}) {
    const LossGradCheck c =
        check_loss_gradients(tiny_document(), ModelConfig{}, EngineConfig{}, obj, 30, options);
    const bool ok = c.result.max_relative_error < 1e-4 && c.result.checked >= 200;
    out.pass = out.pass && ok;
    out.detail += std::string(objective_name(obj)) +
                  fmt(" max rel err %.3g over %.0f scalars  ", c.result.max_relative_error,
                      static_cast<double>(c.result.checked));
  }
  return out;
}

// --- 4 ---------------------------------------------------------------------

Outcome overfit() {
  SchemeConfig scheme;
  scheme.num_docs = 5;
  const auto docs = synth_corpus(scheme);
  TrainConfig cfg;
  cfg.max_epochs = 100;
  cfg.patience = 100;
  int first_epoch = -1;
  TrainHooks hooks;
  hooks.on_epoch = [&](const EpochRecord& r) {
    if (first_epoch < 0 && r.dev_avg_f1 >= 0.95) first_epoch = r.epoch;
  };
  const TrainResult r = train(docs, docs, CorefModel(ModelConfig{}), cfg, hooks);
  return {r.best.dev_avg_f1 >= 0.95,
          fmt("best train avg F1 %.4f at epoch %.0f, first >= 0.95 at epoch %.0f",
              r.best.dev_avg_f1, r.best.epoch, first_epoch)};
}

// --- 5 and 6 ---------------------------------------------------------------

DataSplit make_split(std::uint64_t seed, bool singletons, bool restrict_types, int n_train,
                     int n_dev, int n_test, const char* prefix) {
  SchemeConfig scheme;
  scheme.seed = seed;
  scheme.annotate_singletons = singletons;
  if (restrict_types) scheme.allowed_entity_types = std::set<std::string>{"PER", "LOC"};
  scheme.num_docs = n_train + n_dev + n_test;
  scheme.doc_prefix = prefix;
  const auto docs = synth_corpus(scheme);
  DataSplit d;
  d.train.assign(docs.begin(), docs.begin() + n_train);
  d.dev.assign(docs.begin() + n_train, docs.begin() + n_train + n_dev);
  d.test.assign(docs.begin() + n_train + n_dev, docs.end());
  return d;
}

struct TransferRun {
  double source_test = 0.0;
  double scratch = 0.0;
  double transfer = 0.0;
  std::vector<ForgetRow> shifted;
  std::vector<ForgetRow> same;
};

// Source: no singletons, all types. Shifted target: singletons annotated and
// only PER/LOC entities. Same-scheme target: a fresh sample of the source
// scheme.
TransferRun transfer_run(std::uint64_t seed) {
  const DataSplit source = make_split(seed * 100 + 1, false, false, 200, 20, 40, "src");
  const DataSplit shifted = make_split(seed * 100 + 2, true, true, 20, 10, 40, "tgt");
  const DataSplit same = make_split(seed * 100 + 3, false, false, 20, 10, 40, "same");
  TrainConfig target_cfg;
  target_cfg.seed = seed;
  TrainConfig source_cfg = target_cfg;
  source_cfg.engine.emit_singletons = false;
  ModelConfig model;
  model.seed = seed;

  TransferRun run;
  const TrainResult src = train(source.train, source.dev, CorefModel(model), source_cfg);
  run.source_test = evaluate(src.best.model, source.test, source_cfg.engine).avg_f1;

  CurveSpec scratch;
  scratch.train_sizes = {5};
  scratch.model = model;
  scratch.train = target_cfg;
  scratch.seed = seed;
  CurveSpec transfer = scratch;
  transfer.source = src.best.model;
  run.scratch = learning_curve(shifted, scratch)[0].test_avg_f1;
  run.transfer = learning_curve(shifted, transfer)[0].test_avg_f1;

  run.shifted = forgetting_eval(src.best.model, source.test, source_cfg.engine, shifted,
                                {0, 10, 20}, target_cfg, seed);
  run.same = forgetting_eval(src.best.model, source.test, source_cfg.engine, same, {0, 10, 20},
                             source_cfg, seed);
  return run;
}

std::vector<TransferRun>& transfer_runs() {
  static std::vector<TransferRun> runs = [] {
    std::vector<TransferRun> out(3);
    parallel_for(out.size(), 3, [&](std::size_t i) { out[i] = transfer_run(i + 1); });
    return out;
  }();
  return runs;
}

Outcome transfer_benefit() {
  Outcome out{true, ""};
  for (std::size_t i = 0; i < transfer_runs().size(); ++i) {
    const TransferRun& r = transfer_runs()[i];
    out.pass = out.pass && r.transfer > r.scratch;
    out.detail += fmt("seed %.0f transfer %.4f scratch %.4f  ", i + 1.0, r.transfer, r.scratch);
  }
  return out;
}

Outcome forgetting() {
  Outcome out{true, ""};
  for (std::size_t i = 0; i < transfer_runs().size(); ++i) {
    const TransferRun& r = transfer_runs()[i];
    const double base = r.shifted[0].source_test_f1;
    out.detail += fmt("seed %.0f source %.4f", i + 1.0, base);
    for (std::size_t j = 1; j < r.shifted.size(); ++j) {
      const double shifted_drop = base - r.shifted[j].source_test_f1;
      const double same_drop = r.same[0].source_test_f1 - r.same[j].source_test_f1;
      out.pass = out.pass && shifted_drop > 0.0 && same_drop < shifted_drop;
      out.detail += fmt(" | n=%.0f drop shifted %.4f same %.4f", r.shifted[j].target_size,
                        shifted_drop, same_drop);
    }
    out.detail += "  ";
  }
  return out;
}

// --- 7 ---------------------------------------------------------------------

Outcome freeze_contract() {
  SchemeConfig scheme;
  scheme.num_docs = 12;
  scheme.seed = 7;
  const auto docs = synth_corpus(scheme);
  const std::vector<Document> tr(docs.begin(), docs.begin() + 8), dev(docs.begin() + 8, docs.end());
  const CorefModel init{ModelConfig{}};

  TrainConfig cfg;
  cfg.max_epochs = 5;
  cfg.patience = 5;
  cfg.run_all_epochs = true;
  cfg.track_dev_loss = true;
  cfg.freeze = FreezeMask{0};
  const TrainResult frozen = train(tr, dev, init, cfg);
  bool identical = true;
  for (ParamId id : init.encoder().param_ids()) {
    identical = identical && frozen.best.model.params()[id].value == init.params()[id].value;
  }
  const double before = corpus_loss(init, dev, cfg.engine, cfg.objective);
  const double after = *frozen.history.back().dev_loss;

  cfg.track_dev_loss = false;
  cfg.run_all_epochs = false;
  cfg.max_epochs = 3;
  cfg.patience = 3;
  cfg.freeze = FreezeMask{init.config().encoder.num_layers};
  const TrainResult topk = train(tr, dev, init, cfg);
  cfg.freeze.reset();
  const TrainResult plain = train(tr, dev, init, cfg);
  bool same_run = topk.history.size() == plain.history.size() &&
                  topk.best.model.params().values_equal(plain.best.model.params());
  for (std::size_t i = 0; same_run && i < plain.history.size(); ++i) {
    same_run = topk.history[i].train_loss == plain.history[i].train_loss;
  }
  return {identical && after < before && same_run,
          std::string("k=0 encoder ") + (identical ? "bit-identical" : "CHANGED") +
              fmt(", dev loss %.4f -> %.4f", before, after) + "; k=L vs unfrozen " +
              (same_run ? "bit-identical" : "DIFFERENT")};
}

// --- 8 ---------------------------------------------------------------------

Outcome dev_allocation() {
  SchemeConfig scheme;
  scheme.num_docs = 40;
  scheme.seed = 8;
  const auto docs = synth_corpus(scheme);
  const std::vector<Document> tr(docs.begin(), docs.begin() + 10),
      dev(docs.begin() + 10, docs.begin() + 30), test(docs.begin() + 30, docs.end());
  const CorefModel init{ModelConfig{}};
  TrainConfig cfg;
  cfg.max_epochs = 20;
  cfg.patience = 3;
  const TrainResult stopped = train(tr, dev, init, cfg);

  cfg.run_all_epochs = true;
  cfg.record_predictions = true;
  TrainHooks hooks;
  hooks.test_docs = &test;
  const TrainResult full = train(tr, dev, init, cfg, hooks);

  DevAllocSpec spec;
  spec.dev_subset_sizes = {2, 5, 10, static_cast<int>(dev.size())};
  spec.num_subsets = 20;
  spec.patience = cfg.patience;
  const auto rows = dev_allocation_experiment(full.history, dev, spec);
  const DevAllocRow& whole = rows.back();
  const bool all_match = std::all_of(whole.selected_epochs.begin(), whole.selected_epochs.end(),
                                     [&](int e) { return e == stopped.best.epoch; });
  std::printf("  dev_size  mean_test_f1  std_test_f1  agreement\n");
  for (const DevAllocRow& r : rows) {
    std::printf("  %8d  %12.4f  %11.4f  %6d/%d\n", r.subset_size, r.mean_test_f1,
                r.std_test_f1, r.agreement, r.num_subsets);
  }
  return {whole.agreement == 20 && all_match && rows.size() == 4,
          fmt("full dev subset: %.0f/20 agree, early stopping chose epoch %.0f",
              whole.agreement, stopped.best.epoch)};
}

// --- 9 ---------------------------------------------------------------------

Outcome pruning() {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> len(1, 40);
  std::uniform_real_distribution<double> ratio(0.05, 1.0);
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(rng);
    Document d;
    d.doc_id = "p";
    d.sentences.emplace_back(n, "w");
    const std::vector<Span> spans = enumerate_spans(segment_document(d, 512).at(0), 10);
    const Vec scores = testing::random_scores(spans.size(), -3.0, 3.0, rng);
    const double k = trial % 2 == 0 ? 0.4 : ratio(rng);
    const auto orig = prune_indices(scores, spans, k, n, PruningMode::kOriginal);
    const auto ref = prune_indices(scores, spans, k, n, PruningMode::kReformulated);
    const auto cap = static_cast<std::size_t>(std::ceil(k * n - 1e-9));
    ok = ok && orig.size() == std::min(cap, spans.size()) && ref.size() <= cap &&
         std::includes(orig.begin(), orig.end(), ref.begin(), ref.end());
    for (std::size_t i : ref) ok = ok && scores[i] > 0.0;
  }
  std::vector<Span> ten;
  for (int i = 0; i < 10; ++i) ten.push_back({i, i});
  const Vec scores = testing::random_scores(10, 0.1, 1.0, rng);
  const std::size_t kept = prune_indices(scores, ten, 0.4, 10, PruningMode::kOriginal).size();
  ok = ok && prune_cap(0.4, 10) == 4 && kept == 4;
  return {ok, fmt("1000 vectors checked; n=10 k=0.4 cap %.0f kept %.0f", prune_cap(0.4, 10),
                  static_cast<double>(kept))};
}

// --- 10 --------------------------------------------------------------------

std::string conll_rows(const std::vector<std::string>& column) {
  std::string out = "#begin document (crafted); part 000\n";
  int i = 0;
  for (const std::string& c : column) {
    if (c.empty()) {
      out += "\n";
      continue;
    }
    out += "crafted 0 " + std::to_string(i) + " w" + std::to_string(i) + " " + c + "\n";
    ++i;
  }
  return out + "\n#end document\n";
}

Outcome round_trips() {
  SchemeConfig scheme;
  scheme.num_docs = 100;
  std::vector<Document> docs = synth_corpus(scheme);
  for (const auto& column : std::vector<std::vector<std::string>>{
           {"(1|(2)", "1)", "-"},
           {"(1", "(1", "1)", "1)"},
           {"(7", "(8", "(9)", "8)", "7)"},
           {"(3)", "(4", "(5)", "4)", "", "(3|(4)", "3)"},
           {"-", "-", "", "-"}}) {
    docs.push_back(parse_conll(conll_rows(column)).at(0));
  }
  int failures = 0;
  const std::string conll = write_conll(docs);
  const std::string jsonl = write_jsonl(docs);
  const auto from_conll = parse_conll(conll);
  const auto from_jsonl = parse_jsonl(jsonl);
  if (from_conll.size() != docs.size() || from_jsonl.size() != docs.size()) return {false, "count"};
  for (std::size_t i = 0; i < docs.size(); ++i) {
    failures += !structurally_equal(from_conll[i], docs[i]);
    failures += !structurally_equal(from_jsonl[i], docs[i]);
  }
  failures += write_conll(from_conll) != conll;
  failures += write_jsonl(from_jsonl) != jsonl;
  failures += write_conll(from_jsonl) != conll;
  return {failures == 0, fmt("%.0f documents (100 synthetic + 5 crafted), %.0f mismatches",
                             static_cast<double>(docs.size()), failures)};
}

// --- 11 --------------------------------------------------------------------

// Fifty one-sentence segments over four named entities, all introduced in
// the first ten segments and mentioned again throughout.
Document probe_document() {
  const std::vector<std::string> names{"Alvar", "Brisa", "Corvin", "Dagny"};
  const std::vector<std::string> filler{"the", "met", "near", "river", "later", "spoke",
                                        "with", "again", "about", "it"};
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> word(0, static_cast<int>(filler.size()) - 1);
  std::uniform_int_distribution<int> entity(0, 3);
  Document d;
  d.doc_id = "probe";
  d.clusters.resize(names.size());
  int offset = 0;
  for (int s = 0; s < 50; ++s) {
    std::vector<std::string> sentence;
    std::vector<int> who;
    if (s < 8) {
      who = {s % 4};
    } else {
      who = {entity(rng), entity(rng)};
      if (who[0] == who[1]) who.pop_back();
    }
    for (int e : who) {
      sentence.push_back(filler[word(rng)]);
      d.clusters[e].push_back({offset + static_cast<int>(sentence.size()),
                               offset + static_cast<int>(sentence.size())});
      sentence.push_back(names[e]);
    }
    while (sentence.size() < 8) sentence.push_back(filler[word(rng)]);
    sentence.push_back(".");
    offset += static_cast<int>(sentence.size());
    d.sentences.push_back(std::move(sentence));
  }
  return d;
}

Outcome constant_memory() {
  const Document doc = probe_document();
  TrainConfig cfg;
  cfg.engine.gold_mentions = true;
  cfg.engine.max_segment_len = 12;  // one sentence per segment
  cfg.max_epochs = 40;
  cfg.patience = 40;
  const TrainResult fit = train({doc}, {doc}, CorefModel(ModelConfig{}), cfg);
  const CorefModel& model = fit.best.model;

  ResolveTrace trace;
  const Clustering predicted = resolve_document(doc, model, cfg.engine, &trace);
  if (trace.retained_scalars.size() != 50) {
    return {false, fmt("document has %.0f segments, expected 50",
                       static_cast<double>(trace.retained_scalars.size()))};
  }
  const auto tail = trace.retained_scalars.end() - 40;
  const auto [lo, hi] = std::minmax_element(tail, trace.retained_scalars.end());
  bool proportional = true;
  for (std::size_t i = 0; i < trace.clusters.size(); ++i) {
    proportional = proportional && trace.retained_scalars[i] == trace.clusters[i] * model.span_dim();
  }
  return {*lo == *hi && proportional,
          fmt("retained scalars over final 40 segments in [%.0f, %.0f], clusters %.0f, "
              "fit avg F1 %.4f",
              static_cast<double>(*lo), static_cast<double>(*hi),
              static_cast<double>(trace.clusters.back()), fit.best.dev_avg_f1)};
}

}  // namespace
}  // namespace incoref

int main(int argc, char** argv) {
  using incoref::Criterion;
  const std::vector<Criterion> criteria{
      {1, "metric oracle equivalence", 10, incoref::metric_oracles},
      {2, "worked metric case", 0, incoref::worked_case},
      {3, "gradient verification", 60, incoref::gradients},
      {4, "overfit sanity", 300, incoref::overfit},
      {5, "transfer benefit", 1800, incoref::transfer_benefit},
      {6, "catastrophic forgetting", 1800, incoref::forgetting},
      {7, "freeze contract", 600, incoref::freeze_contract},
      {8, "dev-allocation exactness", 0, incoref::dev_allocation},
      {9, "pruning invariants", 0, incoref::pruning},
      {10, "format round trips", 0, incoref::round_trips},
      {11, "constant-memory probe", 0, incoref::constant_memory},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    incoref::Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // 5 and 6 share one set of runs; the first of them pays for it.
    const bool in_time = c.budget_seconds == 0 || secs < c.budget_seconds;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %s  %s: %s  [%.1fs%s]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                out.detail.c_str(), secs, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
