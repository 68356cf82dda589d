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

#include "incoref/hungarian.h"

#include <algorithm>
#include <limits>

#include "incoref/error.h"

namespace incoref {

Assignment hungarian_max(const std::vector<std::vector<double>>& scores) {
  Assignment result;
  const int rows = static_cast<int>(scores.size());
  if (rows == 0) return result;
  const int cols = static_cast<int>(scores[0].size());
  for (const auto& r : scores) {
    if (static_cast<int>(r.size()) != cols) {
      throw Error(ErrorCategory::kShape, "hungarian_max: ragged score matrix");
    }
  }
  result.row_to_col.assign(rows, -1);
  if (cols == 0) return result;

  // Minimize negated scores on an n x n zero-padded matrix. Potentials u, v
  // and the matching p are 1-based with column 0 as the virtual root.
  const int n = std::max(rows, cols);
  auto cost = [&](int i, int j) {
    return (i < rows && j < cols) ? -scores[i][j] : 0.0;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= n; ++j) {
    const int i = p[j] - 1;
    if (i < rows && j - 1 < cols) result.row_to_col[i] = j - 1;
  }
  for (int i = 0; i < rows; ++i) {
    if (result.row_to_col[i] >= 0) result.total += scores[i][result.row_to_col[i]];
  }
  return result;
}

}  // namespace incoref
