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

#ifndef INCOREF_ENGINE_H_
#define INCOREF_ENGINE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "incoref/corpus.h"
#include "incoref/document.h"
#include "incoref/encoder.h"
#include "incoref/model.h"
#include "incoref/tensor.h"

namespace incoref {

enum class PruningMode {
  // Top ceil(k n) spans by mention score.
  kOriginal,
  // Top ceil(k n) among spans with mention score > 0; may return fewer.
  kReformulated,
};

struct EngineConfig {
  double prune_ratio = 0.4;
  int max_span_width = 10;
  PruningMode pruning_mode = PruningMode::kReformulated;
  // Use the gold mention set instead of enumeration, pruning and s_m.
  bool gold_mentions = false;
  // Overrides the mode-derived singleton policy when set.
  std::optional<bool> emit_singletons;
  int max_segment_len = 512;
};

void validate(const EngineConfig& config);
bool emits_singletons(const EngineConfig& config);
// Whether the linking score includes s_m. Only the original pruning mode
// with predicted mentions links on s_c = s_m + s_a; the reformulated model
// links on s_a, the conditional score of the joint objective, and gold
// mentions skip s_m altogether.
bool links_with_mention_score(const EngineConfig& config);

// Score of the dummy cluster: choosing it starts a new cluster.
inline constexpr double kDummyScore = 0.0;

struct SpanCandidate {
  Span span;  // flat document coordinates
  Vec embedding;
  double mention_score = 0.0;
};

struct EntityCluster {
  int cluster_id = 0;
  Vec embedding;
  std::vector<Span> mentions;  // document order
};

// All spans of width <= max_width inside one sentence, ordered by
// (start, end), in flat document coordinates.
std::vector<Span> enumerate_spans(const Segment& segment, int max_width);

// Per-segment attention logits v . x_t over encoder outputs.
Vec attention_logits(const Matrix& token_embeddings, const CorefModel& model);

// [x_a; x_b; attention-weighted average of x_a..x_b; width embedding].
// `local` is in segment coordinates. `weights` receives the attention.
Vec span_embedding(const Matrix& token_embeddings, std::span<const double> logits,
                   Span local, const CorefModel& model, Vec* weights = nullptr);
// Convenience overload computing the logits itself.
Vec span_embedding(const Matrix& token_embeddings, Span local,
                   const CorefModel& model);

double mention_score(std::span<const double> span_embedding,
                     const CorefModel& model);
// P(M = 1 | x) = sigmoid(s_m).
double mention_probability(double mention_score);

int prune_cap(double ratio, int num_tokens);
// Indices of surviving spans in document order. Ranking is by score
// descending, then earlier start, then shorter span.
std::vector<std::size_t> prune_indices(std::span<const double> scores,
                                       std::span<const Span> spans,
                                       double ratio, int num_tokens,
                                       PruningMode mode);
std::vector<SpanCandidate> prune_spans(const std::vector<SpanCandidate>& candidates,
                                       double ratio, int num_tokens,
                                       PruningMode mode);

// s_a(x, c) over [x; c; x * c].
double cluster_pair_score(std::span<const double> x, std::span<const double> c,
                          const CorefModel& model);
inline double combined_score(double mention, double pair) { return mention + pair; }
// alpha(x, c) = sigmoid(merge scorer over [x; c; x * c]).
double merge_weight(std::span<const double> x, std::span<const double> c,
                    const CorefModel& model);
// c' = alpha x + (1 - alpha) c, with the span appended to the mentions.
void merge(EntityCluster& cluster, const SpanCandidate& span,
           const CorefModel& model);
void merge_with_weight(EntityCluster& cluster, const SpanCandidate& span,
                       double alpha);

// Retained engine state: cluster embeddings and mention indices only.
class IncrementalState {
 public:
  const std::vector<EntityCluster>& clusters() const { return clusters_; }
  std::vector<EntityCluster>& clusters() { return clusters_; }
  int add(const SpanCandidate& span);

  // Floating-point scalars held by the state (|C| * span_dim).
  std::size_t retained_scalars() const;
  std::size_t retained_mention_indices() const;

 private:
  std::vector<EntityCluster> clusters_;
  int next_id_ = 0;
};

// Decision for one span: the index of the best cluster, or -1 for the dummy
// cluster. Ties between clusters go to the lower cluster_id.
struct LinkDecision {
  int cluster = -1;
  double best_score = kDummyScore;
};
LinkDecision decide(const SpanCandidate& span, const IncrementalState& state,
                    const CorefModel& model, const EngineConfig& config);

struct ResolveTrace {
  // Retained floating-point scalars after each segment.
  std::vector<std::size_t> retained_scalars;
  std::vector<std::size_t> clusters;
  std::vector<std::size_t> spans_kept;
};

Clustering resolve_document(const Document& doc, const CorefModel& model,
                            const EngineConfig& config,
                            ResolveTrace* trace = nullptr);

// ---------------------------------------------------------------------------
// Segment pass shared by inference and the training losses.
// ---------------------------------------------------------------------------

struct SegmentPass {
  const Segment* segment = nullptr;
  EncoderCache encoder_cache;
  Matrix tokens;  // encoder output, n x d
  Vec logits;     // attention logits per token
  std::vector<Span> spans;
  std::vector<Vec> embeddings;
  std::vector<Vec> attention;  // per span, when caching
  Vec mention_scores;          // zero in gold-mention mode
  std::vector<Vec> mention_hidden;
  bool cached = false;
};

// Gold spans are those of `gold` that lie in the segment; only used with
// config.gold_mentions.
SegmentPass run_segment(const Segment& segment, const CorefModel& model,
                        const EngineConfig& config, const Clustering* gold,
                        bool keep_caches);

// Backpropagates gradients with respect to span embeddings (entries may be
// empty when zero) and mention scores into the model parameters.
void backward_segment(const SegmentPass& pass, CorefModel& model,
                      const std::vector<Vec>& d_embeddings,
                      const Vec& d_mention_scores);

}  // namespace incoref

#endif  // INCOREF_ENGINE_H_
