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

#include "pmae/harness/config.hpp"

#include <fstream>
#include <stdexcept>

namespace pmae {

RunConfig RunConfig::desk() {
  RunConfig c;
  c.model.embed_dim = 96;
  c.model.encoder_depth = 3;
  c.model.decoder_depth = 1;
  c.model.heads = 4;
  c.model.mlp_ratio = 4.0;
  c.model.pointnet = {32, 64, 128};
  c.model.pos_hidden = 64;
  c.points = 256;
  c.num_patches = 16;
  c.patch_size = 16;
  c.lr = 2e-3;
  c.batch_size = 16;
  c.finetune_epochs = 30;
  c.finetune_batch_size = 16;
  c.finetune_warmup_epochs = 3;
  c.data.points = 256;
  c.data.train_per_class = 16;
  c.data.val_per_class = 4;
  c.data.test_per_class = 20;
  c.data.pretrain_per_class = 64;
  return c;
}

RunConfig RunConfig::paper() {
  RunConfig c;
  c.model = BackboneConfig{};
  c.points = 1024;
  c.num_patches = 64;
  c.patch_size = 32;
  c.epochs = 300;
  c.batch_size = 128;
  c.cls_hidden = 256;
  c.data.points = 1024;
  return c;
}

RunConfig RunConfig::preset(const std::string& name) {
  if (name == "desk") return desk();
  if (name == "paper") return paper();
  throw std::invalid_argument("unknown preset '" + name + "' (expected desk|paper)");
}

void RunConfig::validate() const {
  model.validate();
  if (points == 0 || num_patches == 0 || patch_size == 0) throw std::invalid_argument("config: p, n, k must be positive");
  if (num_patches > points || patch_size > points) {
    throw std::invalid_argument("config: n and k must not exceed p");
  }
  if (data.points != points) throw std::invalid_argument("config: data.points must equal points");
  if (!(mask_ratio >= 0.0 && mask_ratio <= 1.0)) throw std::invalid_argument("config: mask_ratio must lie in [0, 1]");
  if (batch_size == 0 || finetune_batch_size == 0) throw std::invalid_argument("config: batch sizes must be positive");
  if (!(lr > 0.0) || !(finetune_lr > 0.0) || min_lr < 0.0 || weight_decay < 0.0) {
    throw std::invalid_argument("config: learning rates must be positive and weight decay non-negative");
  }
  if (augmentation.scale_min <= 0.0 || augmentation.scale_max < augmentation.scale_min || augmentation.translate < 0.0) {
    throw std::invalid_argument("config: invalid augmentation ranges");
  }
}

nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  json model = {{"embed_dim", c.model.embed_dim},
                {"encoder_depth", c.model.encoder_depth},
                {"decoder_depth", c.model.decoder_depth},
                {"heads", c.model.heads},
                {"mlp_ratio", c.model.mlp_ratio},
                {"mask_tokens_at", to_string(c.model.placement)},
                {"pointnet_hidden", {c.model.pointnet.hidden1, c.model.pointnet.hidden2, c.model.pointnet.hidden3}},
                {"pos_hidden", c.model.pos_hidden},
                {"attn_dropout", c.model.attn_dropout},
                {"mlp_dropout", c.model.mlp_dropout}};
  json data = {{"num_classes", c.data.num_classes},
               {"train_per_class", c.data.train_per_class},
               {"val_per_class", c.data.val_per_class},
               {"test_per_class", c.data.test_per_class},
               {"pretrain_per_class", c.data.pretrain_per_class},
               {"noise", c.data.noise},
               {"seed", c.data.seed}};
  return {{"model", model},
          {"points", c.points},
          {"num_patches", c.num_patches},
          {"patch_size", c.patch_size},
          {"mask_ratio", c.mask_ratio},
          {"mask_type", to_string(c.mask_type)},
          {"lr", c.lr},
          {"min_lr", c.min_lr},
          {"weight_decay", c.weight_decay},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"warmup_epochs", c.warmup_epochs},
          {"checkpoint_every", c.checkpoint_every},
          {"finetune_lr", c.finetune_lr},
          {"finetune_epochs", c.finetune_epochs},
          {"finetune_batch_size", c.finetune_batch_size},
          {"finetune_warmup_epochs", c.finetune_warmup_epochs},
          {"cls_hidden", c.cls_hidden},
          {"fewshot_steps", c.fewshot_steps},
          {"fewshot_lr", c.fewshot_lr},
          {"data", data},
          {"augment", {{"scale_min", c.augmentation.scale_min},
                       {"scale_max", c.augmentation.scale_max},
                       {"translate", c.augmentation.translate}}},
          {"seed", c.seed},
          {"out_dir", c.out_dir}};
}

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
  if (j.contains("model")) {
    const auto& m = j.at("model");
    read(m, "embed_dim", c.model.embed_dim);
    read(m, "encoder_depth", c.model.encoder_depth);
    read(m, "decoder_depth", c.model.decoder_depth);
    read(m, "heads", c.model.heads);
    read(m, "mlp_ratio", c.model.mlp_ratio);
    if (m.contains("mask_tokens_at")) c.model.placement = parse_placement(m.at("mask_tokens_at").get<std::string>());
    if (m.contains("pointnet_hidden")) {
      const auto w = m.at("pointnet_hidden").get<std::vector<std::size_t>>();
      if (w.size() != 3) throw std::invalid_argument("config: pointnet_hidden needs three widths");
      c.model.pointnet = {w[0], w[1], w[2]};
    }
    read(m, "pos_hidden", c.model.pos_hidden);
    read(m, "attn_dropout", c.model.attn_dropout);
    read(m, "mlp_dropout", c.model.mlp_dropout);
  }
  read(j, "points", c.points);
  read(j, "num_patches", c.num_patches);
  read(j, "patch_size", c.patch_size);
  read(j, "mask_ratio", c.mask_ratio);
  if (j.contains("mask_type")) c.mask_type = parse_mask_type(j.at("mask_type").get<std::string>());
  read(j, "lr", c.lr);
  read(j, "min_lr", c.min_lr);
  read(j, "weight_decay", c.weight_decay);
  read(j, "epochs", c.epochs);
  read(j, "batch_size", c.batch_size);
  read(j, "warmup_epochs", c.warmup_epochs);
  read(j, "checkpoint_every", c.checkpoint_every);
  read(j, "finetune_lr", c.finetune_lr);
  read(j, "finetune_epochs", c.finetune_epochs);
  read(j, "finetune_batch_size", c.finetune_batch_size);
  read(j, "finetune_warmup_epochs", c.finetune_warmup_epochs);
  read(j, "cls_hidden", c.cls_hidden);
  read(j, "fewshot_steps", c.fewshot_steps);
  read(j, "fewshot_lr", c.fewshot_lr);
  if (j.contains("data")) {
    const auto& d = j.at("data");
    read(d, "num_classes", c.data.num_classes);
    read(d, "train_per_class", c.data.train_per_class);
    read(d, "val_per_class", c.data.val_per_class);
    read(d, "test_per_class", c.data.test_per_class);
    read(d, "pretrain_per_class", c.data.pretrain_per_class);
    read(d, "noise", c.data.noise);
    read(d, "seed", c.data.seed);
  }
  c.data.points = c.points;
  if (j.contains("augment")) {
    const auto& a = j.at("augment");
    read(a, "scale_min", c.augmentation.scale_min);
    read(a, "scale_max", c.augmentation.scale_max);
    read(a, "translate", c.augmentation.translate);
  }
  read(j, "seed", c.seed);
  read(j, "out_dir", c.out_dir);
  return c;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  return config_from_json(nlohmann::json::parse(in), std::move(base));
}

}  // namespace pmae
