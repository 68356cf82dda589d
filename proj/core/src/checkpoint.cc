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

#include "incoref/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "incoref/error.h"
#include "json.hpp"

namespace incoref {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'I', 'N', 'C', 'O', 'R', 'E', 'F', '\0'};

class Writer {
 public:
  template <typename T>
  void put(T v) {
    out_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const std::string& s) { out_ += s; }
  void doubles(std::span<const double> d) {
    out_.append(reinterpret_cast<const char*>(d.data()), d.size_bytes());
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void doubles(std::span<double> d) {
    need(d.size_bytes());
    std::memcpy(d.data(), in_.data() + pos_, d.size_bytes());
    pos_ += d.size_bytes();
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) {
      throw Error(ErrorCategory::kParse, "checkpoint truncated");
    }
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

nlohmann::json parse_extra(const std::string& extra) {
  try {
    return nlohmann::json::parse(extra.empty() ? "{}" : extra);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kInvalidArgument,
                std::string("checkpoint extra JSON: ") + e.what());
  }
}

}  // namespace

std::string serialize_checkpoint(const CorefModel& model,
                                 const OptimizerState* optimizer,
                                 const std::string& extra_json) {
  Writer w;
  w.bytes(std::string(kMagic, sizeof(kMagic)));
  w.put<std::uint32_t>(kCheckpointVersion);
  nlohmann::json meta{{"model", nlohmann::json::parse(to_json(model.config()))},
                      {"extra", parse_extra(extra_json)}};
  const std::string meta_s = meta.dump();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta_s.size()));
  w.bytes(meta_s);
  const ParamStore& store = model.params();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(store.size()));
  for (const Param& p : store) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p.name.size()));
    w.bytes(p.name);
    w.put<std::uint8_t>(p.group == ParamGroup::kEncoder ? 0 : 1);
    w.put<std::uint8_t>(p.frozen ? 1 : 0);
    w.put<std::uint64_t>(p.value.rows());
    w.put<std::uint64_t>(p.value.cols());
    w.doubles(p.value.flat());
  }
  w.put<std::uint8_t>(optimizer ? 1 : 0);
  if (optimizer) {
    w.put<std::uint64_t>(optimizer->step);
    for (std::size_t i = 0; i < store.size(); ++i) {
      w.doubles(optimizer->first_moment.at(i).flat());
      w.doubles(optimizer->second_moment.at(i).flat());
    }
  }
  return w.take();
}

LoadedCheckpoint deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw Error(ErrorCategory::kParse, "not an incoref checkpoint");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCategory::kIncompatible,
                "unsupported checkpoint version " + std::to_string(version));
  }
  const std::string meta_s = r.bytes(r.get<std::uint32_t>());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_s);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kParse, std::string("checkpoint meta: ") + e.what());
  }
  LoadedCheckpoint out{CorefModel(model_config_from_json(meta.at("model").dump())),
                       std::nullopt, meta.value("extra", nlohmann::json::object()).dump()};
  ParamStore& store = out.model.params();
  const auto count = r.get<std::uint32_t>();
  if (count != store.size()) {
    throw Error(ErrorCategory::kIncompatible,
                "checkpoint has " + std::to_string(count) + " tensors, model expects " +
                    std::to_string(store.size()));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.bytes(r.get<std::uint32_t>());
    const auto group = r.get<std::uint8_t>();
    const auto frozen = r.get<std::uint8_t>();
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    Param& p = store[store.id_of(name)];
    if (p.value.rows() != rows || p.value.cols() != cols) {
      throw Error(ErrorCategory::kIncompatible, "tensor " + name + " shape mismatch");
    }
    if ((group == 0) != (p.group == ParamGroup::kEncoder)) {
      throw Error(ErrorCategory::kIncompatible, "tensor " + name + " group mismatch");
    }
    p.frozen = frozen != 0;
    r.doubles(p.value.flat());
  }
  if (r.get<std::uint8_t>() != 0) {
    OptimizerState state;
    state.step = r.get<std::uint64_t>();
    for (const Param& p : store) {
      Matrix m(p.value.rows(), p.value.cols());
      Matrix v(p.value.rows(), p.value.cols());
      r.doubles(m.flat());
      r.doubles(v.flat());
      state.first_moment.push_back(std::move(m));
      state.second_moment.push_back(std::move(v));
    }
    out.optimizer = std::move(state);
  }
  return out;
}

std::string checkpoint_manifest(const CorefModel& model,
                                const OptimizerState* optimizer,
                                const std::string& extra_json) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const Param& p : model.params()) {
    tensors.push_back({{"name", p.name},
                       {"shape", {p.value.rows(), p.value.cols()}},
                       {"group", std::string(group_name(p.group))},
                       {"frozen", p.frozen}});
  }
  nlohmann::json j{{"format", "incoref-checkpoint"},
                   {"version", kCheckpointVersion},
                   {"model", nlohmann::json::parse(to_json(model.config()))},
                   {"tensors", tensors},
                   {"optimizer_step", optimizer ? nlohmann::json(optimizer->step)
                                                : nlohmann::json(nullptr)},
                   {"extra", parse_extra(extra_json)}};
  return j.dump(2);
}

void save_checkpoint(const std::string& path, const CorefModel& model,
                     const OptimizerState* optimizer, const std::string& extra_json) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw Error(ErrorCategory::kIo, "cannot write " + path);
  const std::string bytes = serialize_checkpoint(model, optimizer, extra_json);
  bin.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  std::ofstream manifest(path + ".json");
  if (!manifest) throw Error(ErrorCategory::kIo, "cannot write " + path + ".json");
  manifest << checkpoint_manifest(model, optimizer, extra_json) << "\n";
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_checkpoint(ss.str());
}

}  // namespace incoref
