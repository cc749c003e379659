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
#include <stdexcept>
#include <string>
#include <vector>

#include "pmae/dataio/dataio.hpp"
#include "pmae/harness/checkpoint.hpp"
#include "pmae/harness/config.hpp"
#include "pmae/harness/metrics.hpp"
#include "pmae/backbone/backbone.hpp"

namespace pmae {

/// A non-finite value surfaced during training. `batch_seed` reproduces the
/// offending batch.
class TrainingAborted : public NumericalError {
 public:
  TrainingAborted(const std::string& what, std::uint64_t batch_seed, std::uint64_t step)
      : NumericalError(what), batch_seed(batch_seed), step(step) {}
  std::uint64_t batch_seed;
  std::uint64_t step;
};

struct PretrainOptions {
  std::optional<Checkpoint> resume;  // continue from this state
  std::size_t stop_after_epoch = 0;  // 0 = run to config.epochs (for tests)
};

struct PretrainResult {
  Checkpoint final_state;
  std::vector<EpochRecord> epochs;
  std::vector<double> step_losses;  // raw batch-mean Chamfer per step
};

/// Fresh, seeded model parameters for the full autoencoder.
ParamStore init_pretrain_params(const RunConfig& config);

/// Masked-reconstruction pretraining on `train`. Writes metrics.jsonl,
/// timing.jsonl and checkpoints into config.out_dir when it is non-empty.
PretrainResult pretrain(const RunConfig& config, const std::vector<LabeledCloud>& train,
                        const PretrainOptions& options = {});

/// Encoder-only backbone plus classification head:
/// concat[max-pool, mean-pool] over all patch tokens -> FC, GELU -> FC.
class ClassifierModel {
 public:
  /// Registers parameters in `store` (which must be empty).
  ClassifierModel(ParamStore& store, const RunConfig& config, std::size_t num_classes);

  std::size_t num_classes() const noexcept { return num_classes_; }

  /// Pooled encoder feature (1 x 2C); patches built from `fps_seed`.
  Var features(Graph& g, const ParamStore& store, const PointCloud& cloud, std::uint64_t fps_seed) const;
  /// Head applied to a pooled feature (1 x K logits).
  Var head(Graph& g, const ParamStore& store, const Var& features) const;
  Var logits(Graph& g, const ParamStore& store, const PointCloud& cloud, std::uint64_t fps_seed) const;

  std::size_t predict(const ParamStore& store, const PointCloud& cloud, std::uint64_t fps_seed) const;
  double accuracy(const ParamStore& store, const std::vector<LabeledCloud>& items) const;

 private:
  RunConfig config_;
  std::size_t num_classes_;
  PointMae backbone_;
  LinearLayer fc1_, fc2_;
};

/// Load encoder weights (embed.*, pe_encoder.*, encoder.*) into a classifier
/// store. With `with_head`, a classifier checkpoint must have `num_classes`
/// classes and its head is loaded too.
void load_encoder_weights(ParamStore& classifier, const Checkpoint& source, std::size_t num_classes,
                          bool with_head = true);

/// Deterministic FPS seed used whenever an item is evaluated.
std::uint64_t eval_fps_seed(const LabeledCloud& item);

struct FinetuneResult {
  Checkpoint final_state;
  std::vector<EpochRecord> epochs;
  double test_accuracy = 0.0;
};

/// Supervised fine-tuning of encoder + head. `init` may be a pretrain or
/// classifier checkpoint; nullopt trains from scratch. Training items are
/// augmented; evaluation never is, and nothing is masked.
FinetuneResult finetune_classify(const RunConfig& config, const DatasetSplit& data,
                                 const std::optional<Checkpoint>& init);

}  // namespace pmae
