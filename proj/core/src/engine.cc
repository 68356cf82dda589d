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

#include "incoref/engine.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "incoref/error.h"
#include "incoref/nn.h"

namespace incoref {

void validate(const EngineConfig& c) {
  if (!(c.prune_ratio > 0.0 && c.prune_ratio <= 1.0)) {
    throw Error(ErrorCategory::kConfig, "prune_ratio must be in (0, 1]");
  }
  if (c.max_span_width < 1) {
    throw Error(ErrorCategory::kConfig, "max_span_width must be >= 1");
  }
  if (c.max_segment_len < 1) {
    throw Error(ErrorCategory::kConfig, "max_segment_len must be >= 1");
  }
}

bool emits_singletons(const EngineConfig& c) {
  if (c.emit_singletons) return *c.emit_singletons;
  return c.pruning_mode == PruningMode::kReformulated;
}

bool links_with_mention_score(const EngineConfig& c) {
  return !c.gold_mentions && c.pruning_mode == PruningMode::kOriginal;
}

std::vector<Span> enumerate_spans(const Segment& segment, int max_width) {
  std::vector<Span> spans;
  const auto& starts = segment.sentence_starts;
  for (std::size_t s = 0; s + 1 < starts.size(); ++s) {
    const int begin = starts[s];
    const int end = starts[s + 1];
    for (int a = begin; a < end; ++a) {
      for (int b = a; b < end && b - a + 1 <= max_width; ++b) {
        spans.push_back(Span{segment.token_offset + a, segment.token_offset + b});
      }
    }
  }
  return spans;
}

Vec attention_logits(const Matrix& tokens, const CorefModel& model) {
  const auto v = model.params()[model.span_attention()].value.flat();
  Vec logits(tokens.rows());
  for (std::size_t t = 0; t < tokens.rows(); ++t) logits[t] = dot(v, tokens.row(t));
  return logits;
}

Vec span_embedding(const Matrix& tokens, std::span<const double> logits,
                   Span local, const CorefModel& model, Vec* weights) {
  if (local.start < 0 || local.end < local.start ||
      local.end >= static_cast<int>(tokens.rows())) {
    throw Error(ErrorCategory::kInvalidArgument, "span_embedding: span outside segment");
  }
  const std::size_t d = model.token_dim();
  const std::size_t a = local.start;
  const std::size_t b = local.end + 1;
  Vec pooled = attention_pool(tokens, a, b, logits.subspan(a, b - a), weights);
  const auto width = model.params()[model.width_table()].value.row(
      width_bucket(local.width()));
  Vec x(model.span_dim());
  std::copy_n(tokens.row(a).begin(), d, x.begin());
  std::copy_n(tokens.row(b - 1).begin(), d, x.begin() + d);
  std::copy(pooled.begin(), pooled.end(), x.begin() + 2 * d);
  std::copy(width.begin(), width.end(), x.begin() + 3 * d);
  return x;
}

Vec span_embedding(const Matrix& tokens, Span local, const CorefModel& model) {
  Vec logits = attention_logits(tokens, model);
  return span_embedding(tokens, logits, local, model);
}

double mention_score(std::span<const double> x, const CorefModel& model) {
  return model.mention_scorer().forward(model.params(), x);
}

double mention_probability(double s) { return sigmoid(s); }

int prune_cap(double ratio, int num_tokens) {
  // The small slack keeps products like 0.4 * 10 from rounding up to 5.
  return static_cast<int>(std::ceil(ratio * num_tokens - 1e-9));
}

std::vector<std::size_t> prune_indices(std::span<const double> scores,
                                       std::span<const Span> spans,
                                       double ratio, int num_tokens,
                                       PruningMode mode) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (mode == PruningMode::kReformulated && !(scores[i] > 0.0)) continue;
    order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (scores[x] != scores[y]) return scores[x] > scores[y];
    if (spans[x].start != spans[y].start) return spans[x].start < spans[y].start;
    return spans[x].end < spans[y].end;
  });
  const std::size_t cap = static_cast<std::size_t>(std::max(0, prune_cap(ratio, num_tokens)));
  if (order.size() > cap) order.resize(cap);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return spans[x] < spans[y];
  });
  return order;
}

std::vector<SpanCandidate> prune_spans(const std::vector<SpanCandidate>& candidates,
                                       double ratio, int num_tokens,
                                       PruningMode mode) {
  Vec scores;
  std::vector<Span> spans;
  for (const auto& c : candidates) {
    scores.push_back(c.mention_score);
    spans.push_back(c.span);
  }
  std::vector<SpanCandidate> out;
  for (std::size_t i : prune_indices(scores, spans, ratio, num_tokens, mode)) {
    out.push_back(candidates[i]);
  }
  return out;
}

double cluster_pair_score(std::span<const double> x, std::span<const double> c,
                          const CorefModel& model) {
  Vec f = pair_features(x, c);
  return model.pair_scorer().forward(model.params(), f);
}

double merge_weight(std::span<const double> x, std::span<const double> c,
                    const CorefModel& model) {
  Vec f = pair_features(x, c);
  return sigmoid(model.merge_scorer().forward(model.params(), f));
}

void merge_with_weight(EntityCluster& cluster, const SpanCandidate& span,
                       double alpha) {
  for (std::size_t k = 0; k < cluster.embedding.size(); ++k) {
    cluster.embedding[k] =
        alpha * span.embedding[k] + (1.0 - alpha) * cluster.embedding[k];
  }
  auto pos = std::upper_bound(cluster.mentions.begin(), cluster.mentions.end(),
                              span.span);
  cluster.mentions.insert(pos, span.span);
}

void merge(EntityCluster& cluster, const SpanCandidate& span,
           const CorefModel& model) {
  merge_with_weight(cluster, span,
                    merge_weight(span.embedding, cluster.embedding, model));
}

int IncrementalState::add(const SpanCandidate& span) {
  EntityCluster c;
  c.cluster_id = next_id_++;
  c.embedding = span.embedding;
  c.mentions.push_back(span.span);
  clusters_.push_back(std::move(c));
  return clusters_.back().cluster_id;
}

std::size_t IncrementalState::retained_scalars() const {
  std::size_t n = 0;
  for (const auto& c : clusters_) n += c.embedding.size();
  return n;
}

std::size_t IncrementalState::retained_mention_indices() const {
  std::size_t n = 0;
  for (const auto& c : clusters_) n += 2 * c.mentions.size();
  return n;
}

LinkDecision decide(const SpanCandidate& span, const IncrementalState& state,
                    const CorefModel& model, const EngineConfig& config) {
  LinkDecision best;
  const double base = links_with_mention_score(config) ? span.mention_score : 0.0;
  double top = -INFINITY;
  int top_index = -1;
  const auto& clusters = state.clusters();
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    const double s =
        combined_score(base, cluster_pair_score(span.embedding,
                                                clusters[j].embedding, model));
    if (s > top) {
      top = s;
      top_index = static_cast<int>(j);
    }
  }
  if (top_index >= 0 && top > kDummyScore) {
    best.cluster = top_index;
    best.best_score = top;
  }
  return best;
}

namespace {

std::vector<Span> gold_spans_in(const Segment& segment, const Clustering& gold) {
  const int lo = segment.token_offset;
  const int hi = segment.token_offset + segment.size();
  std::vector<Span> out;
  for (const auto& c : gold) {
    for (const Span& s : c) {
      if (s.start >= lo && s.end < hi) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SegmentPass run_segment(const Segment& segment, const CorefModel& model,
                        const EngineConfig& config, const Clustering* gold,
                        bool keep_caches) {
  SegmentPass pass;
  pass.segment = &segment;
  pass.cached = keep_caches;
  pass.tokens = model.encoder().forward(model.params(), segment.tokens,
                                        keep_caches ? &pass.encoder_cache : nullptr);
  pass.logits = attention_logits(pass.tokens, model);
  if (config.gold_mentions) {
    if (gold == nullptr) {
      throw Error(ErrorCategory::kInvalidArgument,
                  "gold_mentions mode needs gold clusters");
    }
    pass.spans = gold_spans_in(segment, *gold);
  } else {
    pass.spans = enumerate_spans(segment, config.max_span_width);
  }
  const std::size_t n = pass.spans.size();
  pass.embeddings.resize(n);
  pass.mention_scores.assign(n, 0.0);
  if (keep_caches) {
    pass.attention.resize(n);
    pass.mention_hidden.resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Span local{pass.spans[i].start - segment.token_offset,
                     pass.spans[i].end - segment.token_offset};
    pass.embeddings[i] = span_embedding(pass.tokens, pass.logits, local, model,
                                        keep_caches ? &pass.attention[i] : nullptr);
    if (!config.gold_mentions) {
      pass.mention_scores[i] = model.mention_scorer().forward(
          model.params(), pass.embeddings[i],
          keep_caches ? &pass.mention_hidden[i] : nullptr);
    }
  }
  return pass;
}

void backward_segment(const SegmentPass& pass, CorefModel& model,
                      const std::vector<Vec>& d_embeddings,
                      const Vec& d_mention_scores) {
  if (!pass.cached) {
    throw Error(ErrorCategory::kInvalidArgument,
                "backward_segment needs a cached segment pass");
  }
  ParamStore& store = model.params();
  const std::size_t d = model.token_dim();
  const Segment& segment = *pass.segment;
  Matrix d_tokens(pass.tokens.rows(), d);
  Vec d_logits(pass.tokens.rows(), 0.0);
  Param& width = store[model.width_table()];

  for (std::size_t i = 0; i < pass.spans.size(); ++i) {
    const bool has_emb = i < d_embeddings.size() && !d_embeddings[i].empty();
    const double dms = i < d_mention_scores.size() ? d_mention_scores[i] : 0.0;
    if (!has_emb && dms == 0.0) continue;
    Vec dx = has_emb ? d_embeddings[i] : Vec(model.span_dim(), 0.0);
    if (dms != 0.0) {
      model.mention_scorer().backward(store, pass.embeddings[i],
                                      pass.mention_hidden[i], dms, dx);
    }
    const std::size_t a = pass.spans[i].start - segment.token_offset;
    const std::size_t b = pass.spans[i].end - segment.token_offset + 1;
    std::span<const double> g(dx);
    axpy(1.0, g.subspan(0, d), d_tokens.row(a));
    axpy(1.0, g.subspan(d, d), d_tokens.row(b - 1));
    Vec dlog = attention_pool_backward(pass.tokens, a, b, pass.attention[i],
                                       g.subspan(2 * d, d), d_tokens);
    for (std::size_t t = a; t < b; ++t) d_logits[t] += dlog[t - a];
    axpy(1.0, g.subspan(3 * d), width.grad.row(width_bucket(pass.spans[i].width())));
  }

  Param& attention = store[model.span_attention()];
  for (std::size_t t = 0; t < pass.tokens.rows(); ++t) {
    if (d_logits[t] == 0.0) continue;
    axpy(d_logits[t], pass.tokens.row(t), attention.grad.flat());
    axpy(d_logits[t], attention.value.flat(), d_tokens.row(t));
  }
  model.encoder().backward(store, pass.encoder_cache, d_tokens);
}

Clustering resolve_document(const Document& doc, const CorefModel& model,
                            const EngineConfig& config, ResolveTrace* trace) {
  validate(config);
  IncrementalState state;
  for (const Segment& segment : segment_document(doc, config.max_segment_len)) {
    SegmentPass pass = run_segment(segment, model, config, &doc.clusters, false);
    std::vector<std::size_t> kept;
    if (config.gold_mentions) {
      kept.resize(pass.spans.size());
      std::iota(kept.begin(), kept.end(), std::size_t{0});
    } else {
      kept = prune_indices(pass.mention_scores, pass.spans, config.prune_ratio,
                           segment.size(), config.pruning_mode);
    }
    for (std::size_t i : kept) {
      SpanCandidate cand{pass.spans[i], std::move(pass.embeddings[i]),
                         pass.mention_scores[i]};
      LinkDecision decision = decide(cand, state, model, config);
      if (decision.cluster < 0) {
        state.add(cand);
      } else {
        merge(state.clusters()[decision.cluster], cand, model);
      }
    }
    // Token embeddings and span candidates go out of scope here; only the
    // cluster state survives into the next segment.
    if (trace) {
      trace->retained_scalars.push_back(state.retained_scalars());
      trace->clusters.push_back(state.clusters().size());
      trace->spans_kept.push_back(kept.size());
    }
  }
  Clustering out;
  const bool singletons = emits_singletons(config);
  for (const auto& c : state.clusters()) {
    if (!singletons && c.mentions.size() < 2) continue;
    out.push_back(c.mentions);
  }
  canonicalize(out);
  return out;
}

}  // namespace incoref
