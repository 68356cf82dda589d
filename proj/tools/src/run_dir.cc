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

#include "run_dir.h"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "incoref/error.h"
#include "json.hpp"

namespace incoref::cli {

std::string git_blob_sha1(const std::string& bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx != nullptr && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error(ErrorCategory::kIo, "SHA-1 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCategory::kIo, "write failed: " + path);
}

RunDir::RunDir(std::string dir, std::string command, std::vector<std::string> argv)
    : dir_(std::move(dir)), command_(std::move(command)), argv_(std::move(argv)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCategory::kIo, "cannot create " + dir_ + ": " + ec.message());
}

std::string RunDir::path(const std::string& name) const {
  return (std::filesystem::path(dir_) / name).string();
}

void RunDir::add_input(const std::string& path) {
  inputs_.emplace_back(path, git_blob_sha1(read_file(path)));
}

void RunDir::write_output(const std::string& name, const std::string& bytes) {
  write_file(path(name), bytes);
  add_output(name);
}

void RunDir::add_output(const std::string& name) { outputs_.push_back(name); }

void RunDir::finish(const RunConfig& config) {
  write_file(path("config.ini"), config.to_text());
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& [p, hash] : inputs_) {
    inputs.push_back({{"path", p}, {"sha1", hash}});
  }
  nlohmann::json manifest{
      {"command", command_},
      {"argv", argv_},
      {"seed", config.seed()},
      {"config", config.values()},
      {"inputs", inputs},
      {"outputs", outputs_},
  };
  write_file(path("manifest.json"), manifest.dump(2) + "\n");
}

}  // namespace incoref::cli
