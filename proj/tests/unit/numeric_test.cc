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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "incoref/checkpoint.h"
#include "incoref/error.h"
#include "incoref/gradcheck.h"
#include "incoref/model.h"
#include "incoref/nn.h"
#include "incoref/optimizer.h"
#include "test_util.h"

namespace incoref {
namespace {

constexpr double kH = 1e-6;
constexpr double kTol = 1e-6;

// Central difference of f with respect to the scalar at `x`.
double central_diff(const std::function<double()>& f, double& x) {
  const double saved = x;
  x = saved + kH;
  const double up = f();
  x = saved - kH;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * kH);
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

// Compares every parameter gradient in `store` against central differences.
void expect_param_grads(ParamStore& store, const std::function<double()>& loss) {
  for (Param& p : store) {
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double numeric = central_diff(loss, p.value[k]);
      EXPECT_LT(rel_err(p.grad[k], numeric), kTol) << p.name << "[" << k << "]";
    }
  }
}

void randomize(ParamStore& store, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 0.5);
  for (Param& p : store) {
    for (double& v : p.value.flat()) v = n(rng);
  }
}

TEST(ActivationTest, SigmoidAndLogSigmoid) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(2.0), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  EXPECT_NEAR(log_sigmoid(-1000.0), -1000.0, 1e-9);
  EXPECT_NEAR(log_sigmoid(0.0), -std::log(2.0), 1e-15);
}

TEST(ActivationTest, SoftmaxIsShiftInvariantAndNormalized) {
  const Vec a = softmax(std::vector<double>{1.0, 2.0, 3.0});
  const Vec b = softmax(std::vector<double>{1001.0, 1002.0, 1003.0});
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i], b[i], 1e-15);
    sum += a[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_EQ(softmax(std::vector<double>{0.0, 0.0})[0], 0.5);
  EXPECT_NEAR(log_sum_exp(std::vector<double>{1000.0, 1000.0}),
              1000.0 + std::log(2.0), 1e-12);
}

TEST(LayerGradTest, Linear) {
  ParamStore store;
  const Linear lin(store, "lin", 4, 3, ParamGroup::kTask);
  std::mt19937_64 rng(1);
  randomize(store, rng);
  Vec x = testing::random_scores(4, -1, 1, rng);
  const Vec r = testing::random_scores(3, -1, 1, rng);
  auto loss = [&] {
    Vec y(3);
    lin.forward(store, x, y);
    return dot(r, y);
  };
  store.zero_grad();
  Vec dx(4, 0.0);
  lin.backward(store, x, r, dx);
  expect_param_grads(store, loss);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_LT(rel_err(dx[i], central_diff(loss, x[i])), kTol);
  }
}

TEST(LayerGradTest, FeedForward) {
  ParamStore store;
  const FeedForward ff(store, "ff", 5, 7, ParamGroup::kTask);
  std::mt19937_64 rng(2);
  randomize(store, rng);
  Vec x = testing::random_scores(5, -1, 1, rng);
  auto loss = [&] { return ff.forward(store, x); };
  store.zero_grad();
  Vec act;
  ff.forward(store, x, &act);
  Vec dx(5, 0.0);
  ff.backward(store, x, act, 1.0, dx);
  expect_param_grads(store, loss);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_LT(rel_err(dx[i], central_diff(loss, x[i])), kTol);
  }
}

TEST(LayerGradTest, PairFeatures) {
  std::mt19937_64 rng(3);
  Vec x = testing::random_scores(4, -1, 1, rng);
  Vec c = testing::random_scores(4, -1, 1, rng);
  const Vec r = testing::random_scores(12, -1, 1, rng);
  auto loss = [&] { return dot(r, pair_features(x, c)); };
  Vec dx(4, 0.0), dc(4, 0.0);
  pair_features_backward(x, c, r, dx, dc);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LT(rel_err(dx[i], central_diff(loss, x[i])), kTol);
    EXPECT_LT(rel_err(dc[i], central_diff(loss, c[i])), kTol);
  }
}

TEST(LayerGradTest, AttentionPool) {
  std::mt19937_64 rng(4);
  Matrix rows(6, 3);
  for (double& v : rows.flat()) v = testing::random_scores(1, -1, 1, rng)[0];
  Vec logits = testing::random_scores(3, -1, 1, rng);
  const Vec r = testing::random_scores(3, -1, 1, rng);
  auto loss = [&] { return dot(r, attention_pool(rows, 2, 5, logits, nullptr)); };
  Vec weights;
  attention_pool(rows, 2, 5, logits, &weights);
  Matrix d_rows(6, 3);
  const Vec d_logits = attention_pool_backward(rows, 2, 5, weights, r, d_rows);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    EXPECT_LT(rel_err(d_logits[i], central_diff(loss, logits[i])), kTol);
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_LT(rel_err(d_rows[k], central_diff(loss, rows[k])), kTol) << k;
  }
}

ParamStore two_params() {
  ParamStore store;
  store.add("task", 1, 2, ParamGroup::kTask);
  store.add("enc", 1, 2, ParamGroup::kEncoder);
  return store;
}

TEST(OptimizerTest, ClipsGlobalNormTwentyByHalf) {
  ParamStore store = two_params();
  store[0].grad[0] = 12.0;
  store[0].grad[1] = 0.0;
  store[1].grad[0] = 0.0;
  store[1].grad[1] = 16.0;
  EXPECT_DOUBLE_EQ(clip_grad_norm(store, 10.0), 20.0);
  EXPECT_DOUBLE_EQ(store[0].grad[0], 6.0);
  EXPECT_DOUBLE_EQ(store[1].grad[1], 8.0);

  store[0].grad[0] = 12.0;
  store[1].grad[1] = 16.0;
  Optimizer opt(store, {});
  const StepStats stats = opt.step(store);
  EXPECT_DOUBLE_EQ(stats.grad_norm, 20.0);
  EXPECT_DOUBLE_EQ(stats.clip_scale, 0.5);
}

TEST(OptimizerTest, SmallGradientsAreNotClipped) {
  ParamStore store = two_params();
  store[0].grad[0] = 3.0;
  store[1].grad[0] = 4.0;
  EXPECT_DOUBLE_EQ(clip_grad_norm(store, 10.0), 5.0);
  EXPECT_DOUBLE_EQ(store[0].grad[0], 3.0);
}

TEST(OptimizerTest, FrozenTensorsAreBitIdentical) {
  ParamStore store = two_params();
  store[1].value[0] = 0.25;
  store[1].frozen = true;
  const Matrix before = store[1].value;
  Optimizer opt(store, {});
  for (int i = 0; i < 5; ++i) {
    store[0].grad[0] = 1.0;
    store[1].grad[0] = 1.0;
    opt.step(store);
  }
  EXPECT_EQ(store[1].value, before);
  EXPECT_NE(store[0].value[0], 0.0);
}

TEST(OptimizerTest, DecoupledDecayOnlyOnEncoderGroup) {
  ParamStore store = two_params();
  store[0].value[0] = 1.0;
  store[1].value[0] = 1.0;
  OptimizerConfig cfg;
  cfg.lr_encoder = 0.1;
  cfg.encoder_weight_decay = 0.01;
  Optimizer opt(store, cfg);
  opt.step(store);  // zero gradients: only decay moves anything
  EXPECT_DOUBLE_EQ(store[0].value[0], 1.0);
  EXPECT_DOUBLE_EQ(store[1].value[0], 1.0 - 0.1 * 0.01);
}

TEST(OptimizerTest, FirstAdamStepMovesByLearningRate) {
  ParamStore store = two_params();
  OptimizerConfig cfg;
  cfg.lr_task = 0.01;
  Optimizer opt(store, cfg);
  store[0].grad[0] = 0.3;
  store[0].grad[1] = -2.0;
  opt.step(store);
  // Bias correction makes the first step +-lr per coordinate.
  EXPECT_NEAR(store[0].value[0], -0.01, 1e-9);
  EXPECT_NEAR(store[0].value[1], 0.01, 1e-9);
  EXPECT_EQ(opt.state().step, 1u);
}

TEST(OptimizerTest, ConvergesOnConvexBowl) {
  ParamStore store;
  store.add("p", 1, 3, ParamGroup::kTask);
  const Vec target{1.5, -2.0, 0.5};
  OptimizerConfig cfg;
  cfg.lr_task = 0.05;
  Optimizer opt(store, cfg);
  for (int step = 0; step < 3000; ++step) {
    for (int i = 0; i < 3; ++i) {
      store[0].grad[i] = 2.0 * (store[0].value[i] - target[i]);
    }
    opt.step(store);
  }
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(store[0].value[i], target[i], 1e-3);
}

TEST(OptimizerTest, NonFiniteGradientIsNumericError) {
  ParamStore store = two_params();
  store[0].grad[0] = std::numeric_limits<double>::quiet_NaN();
  Optimizer opt(store, {});
  try {
    opt.step(store);
    FAIL() << "expected a numeric error";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kNumeric);
  }
}

double quadratic(ParamStore& store, bool with_grad) {
  double sum = 0.0;
  for (Param& p : store) {
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      sum += p.value[k] * p.value[k];
      if (with_grad) p.grad[k] += 2.0 * p.value[k];
    }
  }
  return sum;
}

TEST(GradCheckTest, QuadraticIsExact) {
  ParamStore store;
  store.add("a", 10, 10, ParamGroup::kTask);
  store.add("b", 5, 30, ParamGroup::kEncoder);
  // Magnitudes in [0.5, 1.5] keep every gradient away from the relative floor.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::bernoulli_distribution sign(0.5);
  for (Param& p : store) {
    for (double& v : p.value.flat()) v = sign(rng) ? mag(rng) : -mag(rng);
  }
  const GradCheckResult r = grad_check(quadratic, store);
  EXPECT_GE(r.checked, 200u);
  EXPECT_LT(r.max_relative_error, 1e-8);
}

TEST(GradCheckTest, DetectsWrongGradient) {
  ParamStore store;
  store.add("a", 4, 4, ParamGroup::kTask);
  std::mt19937_64 rng(6);
  randomize(store, rng);
  auto wrong = [](ParamStore& s, bool with_grad) {
    const double v = quadratic(s, with_grad);
    if (with_grad) s[0].grad[3] *= 1.5;
    return v;
  };
  const GradCheckResult r = grad_check(wrong, store);
  EXPECT_GT(r.max_relative_error, 0.1);
  EXPECT_EQ(r.worst_param, "a");
}

TEST(GradCheckTest, NonFiniteLossIsAnError) {
  ParamStore store;
  store.add("a", 2, 2, ParamGroup::kTask);
  auto bad = [](ParamStore&, bool) { return std::numeric_limits<double>::infinity(); };
  EXPECT_THROW(grad_check(bad, store), Error);
}

ModelConfig small_model(int width_dim = 12) {
  ModelConfig c;
  c.encoder.num_layers = 2;
  c.encoder.hidden_dim = 8;
  c.encoder.hash_vocab_size = 64;
  c.encoder.max_position = 32;
  c.width_dim = width_dim;
  c.ffnn_hidden = 16;
  c.seed = 4;
  return c;
}

TEST(CheckpointTest, RoundTripWithOptimizerState) {
  CorefModel model(small_model());
  Optimizer opt(model.params(), {});
  for (Param& p : model.params()) p.grad.fill(0.1);
  opt.step(model.params());

  const std::string bytes =
      serialize_checkpoint(model, &opt.state(), R"({"epoch":3})");
  const LoadedCheckpoint back = deserialize_checkpoint(bytes);
  EXPECT_EQ(back.model.config(), model.config());
  EXPECT_TRUE(back.model.params().values_equal(model.params()));
  ASSERT_TRUE(back.optimizer.has_value());
  EXPECT_EQ(back.optimizer->step, 1u);
  EXPECT_EQ(back.optimizer->first_moment, opt.state().first_moment);
  EXPECT_EQ(back.optimizer->second_moment, opt.state().second_moment);
  EXPECT_EQ(back.extra_json, R"({"epoch":3})");
  EXPECT_EQ(serialize_checkpoint(back.model, &*back.optimizer, back.extra_json), bytes);
}

TEST(CheckpointTest, WithoutOptimizer) {
  const CorefModel model(small_model());
  const LoadedCheckpoint back = deserialize_checkpoint(serialize_checkpoint(model, nullptr));
  EXPECT_FALSE(back.optimizer.has_value());
  EXPECT_TRUE(back.model.params().values_equal(model.params()));
}

TEST(CheckpointTest, CorruptInputsAreRejected) {
  const std::string bytes = serialize_checkpoint(CorefModel(small_model()), nullptr);
  try {
    deserialize_checkpoint(bytes.substr(0, bytes.size() / 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kParse);
  }
  try {
    deserialize_checkpoint("not a checkpoint at all");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kParse);
  }
}

TEST(CheckpointTest, ShapeMismatchIsIncompatible) {
  std::string bytes = serialize_checkpoint(CorefModel(small_model(12)), nullptr);
  // Same-length edit of the stored config so the tensors no longer fit it.
  const auto pos = bytes.find("\"width_dim\":12");
  ASSERT_NE(pos, std::string::npos);
  bytes.replace(pos, 14, "\"width_dim\":13");
  try {
    deserialize_checkpoint(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kIncompatible);
  }
}

TEST(CheckpointTest, ManifestDescribesTensors) {
  const CorefModel model(small_model());
  const std::string manifest = checkpoint_manifest(model, nullptr);
  EXPECT_NE(manifest.find("\"version\""), std::string::npos);
  for (const Param& p : model.params()) {
    EXPECT_NE(manifest.find(p.name), std::string::npos) << p.name;
  }
}

}  // namespace
}  // namespace incoref
