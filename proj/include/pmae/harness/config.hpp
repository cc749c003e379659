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

#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "pmae/backbone/backbone.hpp"
#include "pmae/dataio/dataio.hpp"
#include "pmae/masking/masking.hpp"

namespace pmae {

/// Everything a pretrain / fine-tune / few-shot run depends on.
struct RunConfig {
  BackboneConfig model;

  std::size_t points = 256;       // p
  std::size_t num_patches = 16;   // n
  std::size_t patch_size = 16;    // k
  double mask_ratio = 0.6;        // m
  MaskType mask_type = MaskType::Random;

  // Pretraining recipe.
  double lr = 1e-3;
  double min_lr = 1e-6;
  double weight_decay = 0.05;
  std::size_t epochs = 60;
  std::size_t batch_size = 8;
  std::size_t warmup_epochs = 10;
  std::size_t checkpoint_every = 0;  // epochs; 0 = final checkpoint only

  // Classification fine-tuning.
  double finetune_lr = 5e-4;
  std::size_t finetune_epochs = 40;
  std::size_t finetune_batch_size = 8;
  std::size_t finetune_warmup_epochs = 4;
  std::size_t cls_hidden = 64;

  // Few-shot head training on frozen features.
  std::size_t fewshot_steps = 150;
  double fewshot_lr = 1e-2;

  DatasetSpec data;
  AugmentRanges augmentation;
  std::uint64_t seed = 0;
  std::string out_dir;

  /// 6-class synthetic desk-scale setup.
  static RunConfig desk();
  /// Full-size model and recipe (p=1024, n=64, k=32, C=384, 12/4 blocks).
  static RunConfig paper();
  static RunConfig preset(const std::string& name);

  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Fields missing from `j` keep their value from `base`.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = RunConfig::desk());
RunConfig load_config_file(const std::string& path, RunConfig base = RunConfig::desk());

}  // namespace pmae
