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

#ifndef INCOREF_TOOLS_RUN_DIR_H_
#define INCOREF_TOOLS_RUN_DIR_H_

#include <string>
#include <vector>

#include "run_config.h"

namespace incoref::cli {

// Hex SHA-1 of the git blob object for `bytes` ("blob <size>\0" + bytes),
// i.e. what `git hash-object` prints for a file with that content.
std::string git_blob_sha1(const std::string& bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

// Output directory of one run. Holds config.ini (effective configuration),
// manifest.json (command, arguments, seed, input hashes, outputs) and the
// run's own outputs.
class RunDir {
 public:
  RunDir(std::string dir, std::string command, std::vector<std::string> argv);

  std::string path(const std::string& name) const;
  void add_input(const std::string& path);
  // Writes `bytes` to `name` inside the directory and lists it as an output.
  void write_output(const std::string& name, const std::string& bytes);
  void add_output(const std::string& name);
  void finish(const RunConfig& config);

 private:
  std::string dir_;
  std::string command_;
  std::vector<std::string> argv_;
  std::vector<std::pair<std::string, std::string>> inputs_;  // path, hash
  std::vector<std::string> outputs_;
};

}  // namespace incoref::cli

#endif  // INCOREF_TOOLS_RUN_DIR_H_
