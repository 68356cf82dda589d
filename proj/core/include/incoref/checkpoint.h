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

#ifndef INCOREF_CHECKPOINT_H_
#define INCOREF_CHECKPOINT_H_

#include <optional>
#include <string>

#include "incoref/model.h"
#include "incoref/optimizer.h"

namespace incoref {

// Binary layout, little-endian:
//   "INCOREF\0"  u32 version
//   u32 meta length, meta JSON bytes ({"model": ModelConfig, "extra": {...}})
//   u32 tensor count, then per tensor:
//     u32 name length, name, u8 group (0 encoder, 1 task), u8 frozen,
//     u64 rows, u64 cols, rows * cols f64
//   u8 has_optimizer; if set: u64 step, then first and second moments of
//     every tensor in order, each rows * cols f64
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct LoadedCheckpoint {
  CorefModel model;
  std::optional<OptimizerState> optimizer;
  std::string extra_json;
};

std::string serialize_checkpoint(const CorefModel& model,
                                 const OptimizerState* optimizer,
                                 const std::string& extra_json = "{}");
LoadedCheckpoint deserialize_checkpoint(const std::string& bytes);

// JSON manifest: names, shapes, group, frozen flag, model config, extra.
std::string checkpoint_manifest(const CorefModel& model,
                                const OptimizerState* optimizer,
                                const std::string& extra_json = "{}");

// Writes `path` and `path + ".json"`.
void save_checkpoint(const std::string& path, const CorefModel& model,
                     const OptimizerState* optimizer = nullptr,
                     const std::string& extra_json = "{}");
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace incoref

#endif  // INCOREF_CHECKPOINT_H_
