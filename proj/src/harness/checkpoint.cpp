// Copyright 2026 The pmae Authors
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

#include "pmae/harness/checkpoint.hpp"

#include <stdexcept>

#include "pmae/numcore/container.hpp"

namespace pmae {

namespace {
constexpr const char* kFormat = "pmae-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  nlohmann::json meta = {{"format", kFormat},       {"version", kVersion},     {"kind", ckpt.kind},
                         {"config", to_json(ckpt.config)}, {"epoch", ckpt.epoch}, {"step", ckpt.step},
                         {"num_classes", ckpt.num_classes}, {"has_optimizer", ckpt.optimizer.has_value()}};
  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) tensors.emplace_back("param/" + ckpt.params.name(i), &ckpt.params.value(i));
  if (ckpt.optimizer) {
    const auto& opt = *ckpt.optimizer;
    if (opt.m.size() != ckpt.params.size() || opt.v.size() != ckpt.params.size()) {
      throw std::invalid_argument("checkpoint: optimizer state does not match parameters");
    }
    meta["optimizer_step"] = opt.step;
    for (std::size_t i = 0; i < opt.m.size(); ++i) tensors.emplace_back("adam_m/" + ckpt.params.name(i), &opt.m[i]);
    for (std::size_t i = 0; i < opt.v.size(); ++i) tensors.emplace_back("adam_v/" + ckpt.params.name(i), &opt.v[i]);
  }
  write_container_file(path, meta, tensors);
}

Checkpoint load_checkpoint(const std::string& path) {
  Container c = read_container_file(path);
  if (c.meta.value("format", std::string()) != kFormat) throw std::runtime_error(path + ": not a pmae checkpoint");
  if (c.meta.value("version", 0) != kVersion) throw std::runtime_error(path + ": unsupported checkpoint version");

  Checkpoint ckpt;
  ckpt.kind = c.meta.at("kind").get<std::string>();
  ckpt.config = config_from_json(c.meta.at("config"), RunConfig::desk());
  ckpt.epoch = c.meta.at("epoch").get<std::size_t>();
  ckpt.step = c.meta.at("step").get<std::uint64_t>();
  ckpt.num_classes = c.meta.value("num_classes", std::size_t{0});

  OptimizerState opt;
  for (auto& [name, tensor] : c.tensors) {
    if (name.rfind("param/", 0) == 0) {
      ckpt.params.add(name.substr(6), std::move(tensor));
    } else if (name.rfind("adam_m/", 0) == 0) {
      opt.m.push_back(std::move(tensor));
    } else if (name.rfind("adam_v/", 0) == 0) {
      opt.v.push_back(std::move(tensor));
    } else {
      throw std::runtime_error(path + ": unexpected tensor '" + name + "'");
    }
  }
  if (c.meta.value("has_optimizer", false)) {
    if (opt.m.size() != ckpt.params.size() || opt.v.size() != ckpt.params.size()) {
      throw std::runtime_error(path + ": optimizer state incomplete");
    }
    opt.step = c.meta.at("optimizer_step").get<std::uint64_t>();
    ckpt.optimizer = std::move(opt);
  }
  return ckpt;
}

}  // namespace pmae
