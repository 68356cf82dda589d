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

#ifndef INCOREF_GRADCHECK_H_
#define INCOREF_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <string>

#include "incoref/params.h"

namespace incoref {

// Evaluates the loss at the current parameter values. When `with_grad` is
// true it must also accumulate analytic gradients into the store.
using LossFn = std::function<double(ParamStore& store, bool with_grad)>;

struct GradCheckOptions {
  double step = 1e-5;
  // Scalars sampled per tensor; tensors with fewer scalars are checked in
  // full. The sample is drawn with `seed`.
  std::size_t per_tensor = 16;
  std::size_t min_total = 200;
  std::uint64_t seed = 0;
  // Relative error is |a - n| / max(|a|, |n|, floor).
  double floor = 1e-5;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t checked = 0;
  std::string worst_param;
  std::size_t worst_index = 0;
};

// Central finite differences against the analytic gradient. Parameter
// values are restored afterwards; gradients are left zeroed.
GradCheckResult grad_check(const LossFn& loss, ParamStore& store,
                           const GradCheckOptions& options = {});

}  // namespace incoref

#endif  // INCOREF_GRADCHECK_H_
