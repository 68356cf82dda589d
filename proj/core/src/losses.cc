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

#include "incoref/losses.h"

#include <cmath>
#include <map>
#include <numeric>

#include "incoref/error.h"
#include "incoref/nn.h"

namespace incoref {

std::string_view objective_name(Objective o) {
  return o == Objective::kAntecedent ? "antecedent" : "joint";
}

Objective objective_from_name(std::string_view name) {
  if (name == "antecedent" || name == "antecedent_only") return Objective::kAntecedent;
  if (name == "joint" || name == "joint_singleton") return Objective::kJoint;
  throw Error(ErrorCategory::kConfig, "unknown objective " + std::string(name));
}

namespace {

// A version of a cluster embedding inside the current segment's graph.
struct Node {
  enum class Kind { kDetached, kSpan, kMerge };
  Kind kind = Kind::kDetached;
  Vec value;
  Vec grad;
  std::size_t span = 0;  // kSpan, kMerge: index into the segment pass
  std::size_t prev = 0;  // kMerge: node merged into
  double alpha = 0.0;
  Vec merge_features;
  Vec merge_hidden;
};

struct TrainCluster {
  int entity = -1;
  std::size_t node = 0;
  std::vector<Span> mentions;
};

class DocumentLoss {
 public:
  DocumentLoss(const Document& doc, CorefModel& model, const EngineConfig& config,
               Objective objective, bool with_grad, LossTrace* trace)
      : doc_(doc),
        model_(model),
        config_(config),
        objective_(objective),
        with_grad_(with_grad),
        trace_(trace) {
    for (std::size_t e = 0; e < doc.clusters.size(); ++e) {
      for (const Span& s : doc.clusters[e]) entity_of_[s] = static_cast<int>(e);
    }
  }

  double run() {
    validate(config_);
    double total = 0.0;
    for (const Segment& segment : segment_document(doc_, config_.max_segment_len)) {
      total += run_segment_loss(segment);
    }
    return total;
  }

 private:
  int entity(const Span& s) const {
    auto it = entity_of_.find(s);
    return it == entity_of_.end() ? -1 : it->second;
  }

  [[noreturn]] void non_finite(const Span& s) const {
    throw Error(ErrorCategory::kNumeric,
                "non-finite loss at span (" + std::to_string(s.start) + "," +
                    std::to_string(s.end) + ") of document " + doc_.doc_id);
  }

  double run_segment_loss(const Segment& segment) {
    SegmentPass pass = run_segment(segment, model_, config_, &doc_.clusters,
                                   with_grad_);
    const std::size_t n = pass.spans.size();
    std::vector<Vec> d_emb(n);
    Vec d_ms(n, 0.0);
    double loss = 0.0;

    // Mention detection term over every enumerated span.
    if (objective_ == Objective::kJoint && !config_.gold_mentions) {
      for (std::size_t i = 0; i < n; ++i) {
        const double s = pass.mention_scores[i];
        const double p = sigmoid(s);
        double term;
        if (entity(pass.spans[i]) >= 0) {
          term = -log_sigmoid(s);
          d_ms[i] += p - 1.0;
        } else {
          term = -log_sigmoid(-s);
          d_ms[i] += p;
        }
        if (!std::isfinite(term)) non_finite(pass.spans[i]);
        loss += term;
        if (trace_) trace_->mention_loss += term;
      }
    }

    std::vector<std::size_t> kept;
    if (config_.gold_mentions) {
      kept.resize(n);
      std::iota(kept.begin(), kept.end(), std::size_t{0});
    } else {
      kept = prune_indices(pass.mention_scores, pass.spans, config_.prune_ratio,
                           segment.size(), config_.pruning_mode);
    }

    // Clusters from earlier segments enter this graph as constants.
    nodes_.clear();
    for (auto& c : clusters_) {
      Node node;
      node.value = nodes_value_carry_[c.node];
      c.node = nodes_.size();
      nodes_.push_back(std::move(node));
    }

    const bool use_ms = objective_ == Objective::kAntecedent && !config_.gold_mentions;
    const FeedForward& pair = model_.pair_scorer();
    const FeedForward& merge = model_.merge_scorer();
    ParamStore& store = model_.params();

    for (std::size_t i : kept) {
      const Span span = pass.spans[i];
      const int g = entity(span);
      const Vec& x = pass.embeddings[i];
      const bool scored = objective_ == Objective::kAntecedent || g >= 0;
      if (scored) {
        const std::size_t m = clusters_.size();
        Vec scores(m + 1, kDummyScore);
        std::vector<Vec> feats(m), hidden(m);
        Vec weights(m + 1, 0.0);
        double antecedents = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          feats[j] = pair_features(x, nodes_[clusters_[j].node].value);
          const double sa = pair.forward(store, feats[j], &hidden[j]);
          scores[j] = combined_score(use_ms ? pass.mention_scores[i] : 0.0, sa);
          if (g >= 0) {
            for (const Span& s : clusters_[j].mentions) {
              if (entity(s) == g) weights[j] += 1.0;
            }
            antecedents += weights[j];
          }
        }
        if (antecedents == 0.0) {
          weights[m] = 1.0;
        } else {
          for (double& w : weights) w /= antecedents;
        }
        const Vec p = softmax(scores);
        Vec target_scores;
        for (std::size_t j = 0; j <= m; ++j) {
          if (weights[j] > 0.0) target_scores.push_back(scores[j] + std::log(weights[j]));
        }
        const double target_lse = log_sum_exp(target_scores);
        const double term = log_sum_exp(scores) - target_lse;
        if (!std::isfinite(term)) non_finite(span);
        loss += term;
        if (trace_) {
          trace_->linking_loss += term;
          trace_->decisions.push_back(ScoredDecision{span, p, term});
        }
        if (with_grad_) {
          for (std::size_t j = 0; j < m; ++j) {
            const double q =
                weights[j] > 0.0 ? std::exp(scores[j] + std::log(weights[j]) - target_lse)
                                 : 0.0;
            const double ds = p[j] - q;
            if (ds == 0.0) continue;
            if (use_ms) d_ms[i] += ds;
            Vec d_feat(feats[j].size(), 0.0);
            pair.backward(store, feats[j], hidden[j], ds, d_feat);
            Node& c = nodes_[clusters_[j].node];
            if (c.grad.empty()) c.grad.assign(c.value.size(), 0.0);
            if (d_emb[i].empty()) d_emb[i].assign(x.size(), 0.0);
            pair_features_backward(x, c.value, d_feat, d_emb[i], c.grad);
          }
        }
      }
      if (g < 0) continue;

      // Teacher forcing: follow the gold assignment.
      std::size_t target_cluster = clusters_.size();
      for (std::size_t j = 0; j < clusters_.size(); ++j) {
        if (clusters_[j].entity == g) target_cluster = j;
      }
      if (target_cluster == clusters_.size()) {
        Node node;
        node.kind = Node::Kind::kSpan;
        node.value = x;
        node.span = i;
        clusters_.push_back(TrainCluster{g, nodes_.size(), {span}});
        nodes_.push_back(std::move(node));
      } else {
        TrainCluster& c = clusters_[target_cluster];
        Node node;
        node.kind = Node::Kind::kMerge;
        node.span = i;
        node.prev = c.node;
        const Vec& old = nodes_[c.node].value;
        node.merge_features = pair_features(x, old);
        node.alpha = sigmoid(merge.forward(store, node.merge_features, &node.merge_hidden));
        node.value.resize(old.size());
        for (std::size_t k = 0; k < old.size(); ++k) {
          node.value[k] = node.alpha * x[k] + (1.0 - node.alpha) * old[k];
        }
        c.node = nodes_.size();
        c.mentions.push_back(span);
        nodes_.push_back(std::move(node));
      }
    }

    if (with_grad_) {
      for (std::size_t k = nodes_.size(); k-- > 0;) {
        Node& node = nodes_[k];
        if (node.grad.empty() || node.kind == Node::Kind::kDetached) continue;
        Vec& dx = d_emb[node.span];
        if (dx.empty()) dx.assign(node.value.size(), 0.0);
        if (node.kind == Node::Kind::kSpan) {
          axpy(1.0, node.grad, dx);
          continue;
        }
        Node& prev = nodes_[node.prev];
        const Vec& x = pass.embeddings[node.span];
        if (prev.grad.empty()) prev.grad.assign(prev.value.size(), 0.0);
        double d_alpha = 0.0;
        for (std::size_t t = 0; t < x.size(); ++t) {
          d_alpha += node.grad[t] * (x[t] - prev.value[t]);
          dx[t] += node.alpha * node.grad[t];
          prev.grad[t] += (1.0 - node.alpha) * node.grad[t];
        }
        const double d_logit = d_alpha * node.alpha * (1.0 - node.alpha);
        Vec d_feat(node.merge_features.size(), 0.0);
        merge.backward(store, node.merge_features, node.merge_hidden, d_logit, d_feat);
        pair_features_backward(x, prev.value, d_feat, dx, prev.grad);
      }
      backward_segment(pass, model_, d_emb, d_ms);
    }

    // Carry cluster values into the next segment.
    nodes_value_carry_.clear();
    for (auto& c : clusters_) {
      nodes_value_carry_.push_back(nodes_[c.node].value);
      c.node = nodes_value_carry_.size() - 1;
    }
    return loss;
  }

  const Document& doc_;
  CorefModel& model_;
  const EngineConfig& config_;
  Objective objective_;
  bool with_grad_;
  LossTrace* trace_;
  std::map<Span, int> entity_of_;
  std::vector<TrainCluster> clusters_;
  std::vector<Node> nodes_;
  std::vector<Vec> nodes_value_carry_;
};

}  // namespace

double document_loss(const Document& doc, CorefModel& model,
                     const EngineConfig& config, Objective objective,
                     bool with_grad, LossTrace* trace) {
  DocumentLoss loss(doc, model, config, objective, with_grad, trace);
  return loss.run();
}

}  // namespace incoref
