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
#include <optional>
#include <string>
#include <vector>

#include "pmae/harness/train.hpp"

namespace pmae {

// ---------------------------------------------------------------------------
// Few-shot

struct FewshotOptions {
  std::size_t n_way = 5;
  std::size_t m_shot = 1;
  std::size_t runs = 10;
  std::size_t test_per_class = 20;
  std::uint64_t seed = 0;
};

struct FewshotResult {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::vector<double> accuracies;
};

/// n-way m-shot episodes over `pool`. Each run samples classes, supports and
/// queries from a run-indexed seed, trains a fresh head on frozen encoder
/// features and scores the queries. `encoder` may be nullopt (random encoder).
FewshotResult fewshot_eval(const RunConfig& config, const std::optional<Checkpoint>& encoder,
                           const std::vector<LabeledCloud>& pool, const FewshotOptions& options);

// ---------------------------------------------------------------------------
// Masking ablation

struct AblationCell {
  MaskType type = MaskType::Random;
  double ratio = 0.6;
  MaskTokenPlacement placement = MaskTokenPlacement::Decoder;
  bool finetune = true;
};

struct AblationRow {
  AblationCell cell;
  std::uint64_t seed = 0;
  double loss_x1000 = 0.0;          // final-epoch pretraining loss
  std::optional<double> accuracy;   // test accuracy after fine-tuning
};

/// Seed of cell `index` for a master seed.
std::uint64_t ablation_cell_seed(std::uint64_t master, std::size_t index);

/// Random and block masking at {0.4, 0.6, 0.8}, plus random 0.6 with mask
/// tokens at the encoder.
std::vector<AblationCell> default_ablation_grid();

/// Independent pretrain (+ fine-tune) per cell with fresh per-cell seeds.
std::vector<AblationRow> ablate_mask(const RunConfig& base, const DatasetSplit& data,
                                     const std::vector<AblationCell>& cells);

std::string format_ablation_table(const std::vector<AblationRow>& rows);

// ---------------------------------------------------------------------------
// Reconstruction export

struct ReconstructionResult {
  PointCloud input;
  PointCloud masked_view;     // input minus every point of a masked patch
  PointCloud predicted;       // predicted masked patches, re-anchored at centers
  PointCloud reconstruction;  // masked_view + predicted
  PointCloud baseline;        // masked_view + k copies of each masked center
  double chamfer_reconstruction = 0.0;
  double chamfer_baseline = 0.0;
  std::size_t masked_patches = 0;
  std::vector<std::string> files;
};

/// Masked forward at `ratio` with a pretrained autoencoder. Writes
/// input.ply, masked.ply and reconstruction.ply when `out_dir` is non-empty.
ReconstructionResult reconstruct(const Checkpoint& autoencoder, const PointCloud& cloud, double ratio,
                                 MaskType type, std::uint64_t seed, const std::string& out_dir);

}  // namespace pmae
