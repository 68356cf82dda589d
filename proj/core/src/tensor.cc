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

#include "incoref/tensor.h"

#include <cmath>
#include <cstring>

#include "incoref/error.h"
#include "incoref/params.h"

namespace incoref {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double squared_norm(std::span<const double> x) { return dot(x, x); }

bool all_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string_view group_name(ParamGroup g) {
  return g == ParamGroup::kEncoder ? "encoder" : "task";
}

ParamId ParamStore::add(const std::string& name, std::size_t rows,
                        std::size_t cols, ParamGroup group) {
  if (index_.contains(name)) {
    throw Error(ErrorCategory::kInvalidArgument, "duplicate parameter " + name);
  }
  ParamId id = params_.size();
  params_.push_back(Param{name, Matrix(rows, cols), Matrix(rows, cols), group, false});
  index_.emplace(name, id);
  return id;
}

ParamId ParamStore::id_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw Error(ErrorCategory::kInvalidArgument,
                "unknown parameter " + std::string(name));
  }
  return it->second;
}

bool ParamStore::contains(std::string_view name) const {
  return index_.find(name) != index_.end();
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.grad.fill(0.0);
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

std::size_t ParamStore::trainable_scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) {
    if (!p.frozen) n += p.value.size();
  }
  return n;
}

bool ParamStore::values_equal(const ParamStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name != other.params_[i].name ||
        !params_[i].value.same_shape(other.params_[i].value) ||
        std::memcmp(params_[i].value.flat().data(),
                    other.params_[i].value.flat().data(),
                    params_[i].value.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace incoref
