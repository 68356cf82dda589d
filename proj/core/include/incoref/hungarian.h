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

#ifndef INCOREF_HUNGARIAN_H_
#define INCOREF_HUNGARIAN_H_

#include <vector>

namespace incoref {

struct Assignment {
  // row_to_col[r] is the column matched to row r, or -1 when r has no real
  // column (more rows than columns).
  std::vector<int> row_to_col;
  double total = 0.0;
};

// Maximum-weight one-to-one assignment (Kuhn-Munkres with potentials,
// O(n^3)). Rectangular inputs are padded with zero entries. `scores` is
// row-major; all rows must have equal length.
Assignment hungarian_max(const std::vector<std::vector<double>>& scores);

}  // namespace incoref

#endif  // INCOREF_HUNGARIAN_H_
