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

#ifndef INCOREF_TOOLS_COMMANDS_H_
#define INCOREF_TOOLS_COMMANDS_H_

namespace incoref::cli {

// Parses the command line and runs one subcommand. Failures print a single
// line "<category>: <detail>" to stderr and return nonzero.
int run_cli(int argc, char** argv);

}  // namespace incoref::cli

#endif  // INCOREF_TOOLS_COMMANDS_H_
