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

#ifndef INCOREF_PARAMS_H_
#define INCOREF_PARAMS_H_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "incoref/tensor.h"

namespace incoref {

// Learning-rate group. The encoder group uses the encoder learning rate and
// decoupled weight decay; everything else is the task group.
enum class ParamGroup { kEncoder, kTask };

std::string_view group_name(ParamGroup g);

struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  ParamGroup group = ParamGroup::kTask;
  bool frozen = false;
};

using ParamId = std::size_t;

// Named tensors in registration order. Frozen tensors still accumulate
// gradients; the optimizer leaves their values untouched.
class ParamStore {
 public:
  ParamId add(const std::string& name, std::size_t rows, std::size_t cols,
              ParamGroup group);

  Param& operator[](ParamId id) { return params_[id]; }
  const Param& operator[](ParamId id) const { return params_[id]; }
  ParamId id_of(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::size_t size() const { return params_.size(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();
  std::size_t scalar_count() const;
  std::size_t trainable_scalar_count() const;
  // Bitwise comparison of values.
  bool values_equal(const ParamStore& other) const;

 private:
  std::vector<Param> params_;
  std::map<std::string, ParamId, std::less<>> index_;
};

}  // namespace incoref

#endif  // INCOREF_PARAMS_H_
