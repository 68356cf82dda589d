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

#ifndef INCOREF_ERROR_H_
#define INCOREF_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace incoref {

// Coarse failure categories. The CLI prints the category name as the first
// token of its single-line error report.
enum class ErrorCategory {
  kParse,
  kInvalidArgument,
  kShape,
  kNumeric,
  kIo,
  kConfig,
  kIncompatible,
};

std::string_view category_name(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& detail)
      : std::runtime_error(detail), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace incoref

#endif  // INCOREF_ERROR_H_
