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

#include "incoref/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "incoref/error.h"

namespace incoref {

GradCheckResult grad_check(const LossFn& loss, ParamStore& store,
                           const GradCheckOptions& options) {
  store.zero_grad();
  const double base = loss(store, true);
  if (!std::isfinite(base)) {
    throw Error(ErrorCategory::kNumeric, "grad_check: loss is not finite");
  }
  std::vector<Matrix> analytic;
  for (const Param& p : store) analytic.push_back(p.grad);
  store.zero_grad();

  // Pick scalars: every tensor contributes up to per_tensor entries; if that
  // falls short of min_total, the quota grows until it is met or exhausted.
  std::mt19937_64 rng(options.seed);
  std::size_t quota = options.per_tensor;
  std::vector<std::vector<std::size_t>> picks;
  for (;;) {
    picks.clear();
    std::size_t total = 0, available = 0;
    std::mt19937_64 local = rng;
    for (const Param& p : store) {
      std::vector<std::size_t> idx(p.value.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      if (idx.size() > quota) {
        std::shuffle(idx.begin(), idx.end(), local);
        idx.resize(quota);
        std::sort(idx.begin(), idx.end());
      }
      total += idx.size();
      available += p.value.size();
      picks.push_back(std::move(idx));
    }
    if (total >= options.min_total || total == available) break;
    quota *= 2;
  }

  GradCheckResult result;
  for (std::size_t t = 0; t < store.size(); ++t) {
    for (std::size_t k : picks[t]) {
      double& x = store[t].value[k];
      const double saved = x;
      x = saved + options.step;
      const double plus = loss(store, false);
      x = saved - options.step;
      const double minus = loss(store, false);
      x = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw Error(ErrorCategory::kNumeric,
                    "grad_check: non-finite loss perturbing " + store[t].name);
      }
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double a = analytic[t][k];
      const double abs_err = std::abs(a - numeric);
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.floor});
      const double rel = abs_err / denom;
      result.max_absolute_error = std::max(result.max_absolute_error, abs_err);
      if (rel > result.max_relative_error || result.checked == 0) {
        result.max_relative_error = std::max(result.max_relative_error, rel);
        if (rel >= result.max_relative_error) {
          result.worst_param = store[t].name;
          result.worst_index = k;
        }
      }
      ++result.checked;
    }
  }
  store.zero_grad();
  return result;
}

}  // namespace incoref
