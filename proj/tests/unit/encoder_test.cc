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

#include "incoref/encoder.h"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>

#include "incoref/engine.h"
#include "incoref/error.h"
#include "incoref/losses.h"
#include "incoref/model.h"
#include "incoref/optimizer.h"
#include "incoref/synth.h"
#include "test_util.h"

namespace incoref {
namespace {

using testing::small_model_config;

std::vector<std::string> words(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(i % 3 == 0 ? "Name" + std::to_string(i) : "w");
  return out;
}

TEST(EncoderTest, OutputShape) {
  const CorefModel model(small_model_config());
  const Matrix out = model.encoder().forward(model.params(), words(11), nullptr);
  EXPECT_EQ(out.rows(), 11u);
  EXPECT_EQ(out.cols(), 8u);
  EXPECT_TRUE(all_finite(out.flat()));
}

TEST(EncoderTest, DeterministicPerSeed) {
  const CorefModel a(small_model_config(1));
  const CorefModel b(small_model_config(1));
  const CorefModel c(small_model_config(2));
  const auto toks = words(7);
  const Matrix oa = a.encoder().forward(a.params(), toks, nullptr);
  EXPECT_EQ(oa, b.encoder().forward(b.params(), toks, nullptr));
  EXPECT_NE(oa, c.encoder().forward(c.params(), toks, nullptr));
}

TEST(EncoderTest, RejectsSegmentsLongerThanMaxPosition) {
  const CorefModel model(small_model_config());
  EXPECT_THROW(model.encoder().forward(model.params(), words(129), nullptr), Error);
}

TEST(EncoderTest, ContextChangesNeighbours) {
  // Changing one token moves outputs within the mixing radius of every layer.
  const CorefModel model(small_model_config());
  auto toks = words(12);
  const Matrix before = model.encoder().forward(model.params(), toks, nullptr);
  toks[6] = "Different";
  const Matrix after = model.encoder().forward(model.params(), toks, nullptr);
  EXPECT_NE(before.row(5)[0], after.row(5)[0]);
  EXPECT_EQ(before.row(0)[0], after.row(0)[0]);  // 2 layers * radius 2 < 6
}

TEST(EncoderTest, WordShapes) {
  EXPECT_EQ(word_shape("Oslo"), "Xx");
  EXPECT_EQ(word_shape("oslo"), "x");
  EXPECT_EQ(word_shape("1999"), "d");
  EXPECT_EQ(word_shape("."), "p");
  const auto [a, b] = token_rows("Oslo", 4096);
  EXPECT_LT(a, 4096u);
  EXPECT_LT(b, 4096u);
  EXPECT_EQ(token_rows("Oslo", 4096), token_rows("Oslo", 4096));
}

TEST(EncoderTest, BackwardMatchesFiniteDifferences) {
  CorefModel model(small_model_config());
  ParamStore& store = model.params();
  const Encoder& enc = model.encoder();
  const auto toks = words(6);
  std::mt19937_64 rng(9);
  Matrix r(6, 8);
  for (double& v : r.flat()) v = testing::random_scores(1, -1, 1, rng)[0];
  auto loss = [&] {
    return dot(r.flat(), enc.forward(store, toks, nullptr).flat());
  };
  store.zero_grad();
  EncoderCache cache;
  enc.forward(store, toks, &cache);
  enc.backward(store, cache, r);

  const double h = 1e-6;
  int checked = 0;
  for (ParamId id : enc.param_ids()) {
    Param& p = store[id];
    // The tables are large; only rows touched by these tokens matter, and
    // those are where the gradient is nonzero. Check a stride of entries.
    for (std::size_t k = 0; k < p.value.size(); k += (p.value.size() > 200 ? 7 : 1)) {
      const double saved = p.value[k];
      p.value[k] = saved + h;
      const double up = loss();
      p.value[k] = saved - h;
      const double down = loss();
      p.value[k] = saved;
      const double numeric = (up - down) / (2 * h);
      const double err = std::abs(numeric - p.grad[k]) /
                         std::max({std::abs(numeric), std::abs(p.grad[k]), 1e-8});
      ASSERT_LT(err, 1e-6) << p.name << "[" << k << "]";
      ++checked;
    }
  }
  EXPECT_GT(checked, 200);
}

std::set<std::string> trainable_encoder_tensors(const CorefModel& model) {
  std::set<std::string> out;
  for (ParamId id : model.encoder().param_ids()) {
    if (!model.params()[id].frozen) out.insert(model.params()[id].name);
  }
  return out;
}

TEST(FreezeTest, MaskSelectsTopLayers) {
  ModelConfig cfg = small_model_config();
  cfg.encoder.num_layers = 4;
  CorefModel model(cfg);

  model.apply_freeze({0});
  EXPECT_TRUE(trainable_encoder_tensors(model).empty());

  model.apply_freeze({1});
  for (const std::string& name : trainable_encoder_tensors(model)) {
    EXPECT_NE(name.find("layer3"), std::string::npos) << name;
  }
  EXPECT_FALSE(trainable_encoder_tensors(model).empty());

  model.apply_freeze({4});
  EXPECT_EQ(trainable_encoder_tensors(model).size(), model.encoder().param_ids().size());

  EXPECT_THROW(model.apply_freeze({5}), Error);
  EXPECT_THROW(model.apply_freeze({-1}), Error);
}

TEST(FreezeTest, TrainableCountIsMonotoneInK) {
  ModelConfig cfg = small_model_config();
  cfg.encoder.num_layers = 5;
  CorefModel model(cfg);
  std::size_t previous = 0;
  for (int k = 0; k <= 5; ++k) {
    model.apply_freeze({k});
    const std::size_t n = model.params().trainable_scalar_count();
    if (k > 0) EXPECT_GT(n, previous) << "k=" << k;
    previous = n;
  }
  model.unfreeze_all();
  EXPECT_EQ(model.params().trainable_scalar_count(), model.params().scalar_count());
}

TEST(FreezeTest, OneStepChangesExactlyTheTopLayers) {
  ModelConfig cfg = small_model_config();
  cfg.encoder.num_layers = 4;
  const Document doc = tiny_document();
  EngineConfig engine;
  engine.gold_mentions = true;  // guarantees linking terms in the loss
  for (int k = 0; k <= 4; ++k) {
    CorefModel model(cfg);
    model.apply_freeze({k});
    const CorefModel before = model;
    Optimizer opt(model.params(), {});
    model.params().zero_grad();
    const double loss = joint_loss(doc, model, engine, true);
    ASSERT_GT(loss, 0.0);
    opt.step(model.params());
    for (int l = 0; l < 4; ++l) {
      const bool should_change = l >= 4 - k;
      for (ParamId id : model.encoder().layer_param_ids(l)) {
        const bool changed = model.params()[id].value != before.params()[id].value;
        EXPECT_EQ(changed, should_change) << "k=" << k << " " << model.params()[id].name;
      }
    }
    // Task tensors always train.
    const ParamId pair_w = model.pair_scorer().hidden_layer().weight();
    EXPECT_NE(model.params()[pair_w].value, before.params()[pair_w].value);
  }
}

}  // namespace
}  // namespace incoref
