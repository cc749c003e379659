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

#include "pmae/harness/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <numeric>

#include "pmae/numcore/ops.hpp"

namespace pmae {

namespace {

// Seed stream tags.
constexpr std::uint64_t kInitTag = 1;
constexpr std::uint64_t kShuffleTag = 2;
constexpr std::uint64_t kBatchTag = 3;
constexpr std::uint64_t kClassifierInitTag = 11;
constexpr std::uint64_t kFinetuneShuffleTag = 12;
constexpr std::uint64_t kFinetuneBatchTag = 13;
constexpr std::uint64_t kEvalFpsTag = 0x5eed;

using Clock = std::chrono::steady_clock;

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
  return order;
}

struct BatchResult {
  ParamGrads grads;
  double loss = 0.0;
};

// Per-item graphs run in parallel; gradients are summed in item order so the
// result does not depend on the thread count.
template <typename Fn>
BatchResult batch_gradients(const ParamStore& store, std::size_t count, std::uint64_t batch_seed,
                            std::uint64_t step, Fn&& item_loss) {
  std::vector<ParamGrads> grads(count);
  std::vector<double> losses(count, 0.0);
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < count; ++j) {
    try {
      Graph g;
      const Var loss = item_loss(g, j);
      losses[j] = loss.value().item();
      grads[j] = ParamGrads::zeros_like(store);
      g.backward(loss, grads[j]);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (std::size_t j = 0; j < count; ++j) {
    if (!errors[j]) continue;
    try {
      std::rethrow_exception(errors[j]);
    } catch (const NumericalError& e) {
      throw TrainingAborted(std::string("non-finite value at step ") + std::to_string(step) + ", batch seed " +
                                std::to_string(batch_seed) + ", item " + std::to_string(j) + ": " + e.what(),
                            batch_seed, step);
    }
  }
  BatchResult out;
  out.grads = std::move(grads[0]);
  out.loss = losses[0];
  for (std::size_t j = 1; j < count; ++j) {
    out.grads.accumulate(grads[j]);
    out.loss += losses[j];
  }
  const double inv = 1.0 / static_cast<double>(count);
  out.grads.scale(inv);
  out.loss *= inv;
  if (!std::isfinite(out.loss) || !out.grads.all_finite()) {
    throw TrainingAborted("non-finite loss or gradient at step " + std::to_string(step) + ", batch seed " +
                              std::to_string(batch_seed),
                          batch_seed, step);
  }
  return out;
}

struct Schedule {
  std::uint64_t total = 0;
  std::uint64_t warmup = 0;
  std::size_t steps_per_epoch = 0;
};

Schedule make_schedule(std::size_t items, std::size_t batch, std::size_t epochs, std::size_t warmup_epochs) {
  Schedule s;
  s.steps_per_epoch = (items + batch - 1) / batch;
  s.total = static_cast<std::uint64_t>(epochs) * s.steps_per_epoch;
  s.warmup = static_cast<std::uint64_t>(warmup_epochs) * s.steps_per_epoch;
  if (s.total > 0 && s.warmup >= s.total) s.warmup = s.total - 1;
  return s;
}

double step_lr(const Schedule& s, std::uint64_t step, double lr_max, double lr_min) {
  // The lr for optimizer step `step` (0-based) is the schedule value after it.
  return cosine_lr(step + 1, s.total, lr_max, lr_min, s.warmup);
}

OptimizerState optimizer_state(const AdamW& opt) {
  return OptimizerState{opt.steps(), opt.first_moments(), opt.second_moments()};
}

std::string checkpoint_path(const std::string& dir, const std::string& stem) { return dir + "/" + stem + ".pmae"; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

ParamStore init_pretrain_params(const RunConfig& config) {
  ParamStore store;
  Rng rng(derive_seed(config.seed, kInitTag));
  PointMae model(store, rng, config.model, config.patch_size);
  return store;
}

PretrainResult pretrain(const RunConfig& config, const std::vector<LabeledCloud>& train,
                        const PretrainOptions& options) {
  config.validate();
  if (train.empty()) throw std::invalid_argument("pretrain: empty training set");

  ParamStore store;
  Rng init_rng(derive_seed(config.seed, kInitTag));
  const PointMae model(store, init_rng, config.model, config.patch_size);
  AdamW opt(store, AdamWConfig{config.weight_decay});

  std::size_t epoch = 0;
  std::uint64_t step = 0;
  if (options.resume) {
    const Checkpoint& r = *options.resume;
    if (r.kind != "pretrain") throw std::invalid_argument("pretrain: cannot resume from a '" + r.kind + "' checkpoint");
    if (copy_matching(store, r.params, [](const std::string&) { return true; }) != store.size() ||
        r.params.size() != store.size()) {
      throw std::invalid_argument("pretrain: checkpoint parameters do not match the model");
    }
    if (r.optimizer) opt.restore(r.optimizer->step, r.optimizer->m, r.optimizer->v);
    epoch = r.epoch;
    step = r.step;
  }

  const Schedule sched = make_schedule(train.size(), config.batch_size, config.epochs, config.warmup_epochs);
  const std::size_t last_epoch =
      options.stop_after_epoch > 0 ? std::min(options.stop_after_epoch, config.epochs) : config.epochs;
  MetricsLog log(config.out_dir, "metrics", options.resume.has_value());
  const ForwardContext ctx{};

  PretrainResult result;
  auto snapshot = [&](std::size_t done) {
    Checkpoint c;
    c.kind = "pretrain";
    c.config = config;
    c.epoch = done;
    c.step = step;
    c.params = store;
    c.optimizer = optimizer_state(opt);
    return c;
  };

  for (; epoch < last_epoch; ++epoch) {
    const auto t0 = Clock::now();
    const auto order = shuffled_order(train.size(), derive_seed(config.seed, kShuffleTag, epoch));
    double epoch_loss = 0.0;
    double lr = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      const std::uint64_t batch_seed = derive_seed(config.seed, kBatchTag, step);
      lr = step_lr(sched, step, config.lr, config.min_lr);
      BatchResult br = batch_gradients(store, count, batch_seed, step, [&](Graph& g, std::size_t j) {
        const std::uint64_t item_seed = derive_seed(batch_seed, j);
        const PointCloud cloud = augment(train[order[start + j]].cloud, derive_seed(item_seed, 0), config.augmentation);
        return model
            .pretrain_forward(g, store, cloud, config.num_patches, config.mask_ratio, config.mask_type,
                              derive_seed(item_seed, 1), ctx)
            .loss;
      });
      opt.step(store, br.grads, lr);
      ++step;
      result.step_losses.push_back(br.loss);
      epoch_loss += br.loss;
    }
    EpochRecord rec{"pretrain", epoch + 1, step, epoch_loss / static_cast<double>(sched.steps_per_epoch), lr, {}};
    log.write(rec, seconds_since(t0));
    result.epochs.push_back(rec);
    if (!config.out_dir.empty() && config.checkpoint_every > 0 && (epoch + 1) % config.checkpoint_every == 0) {
      char stem[64];
      std::snprintf(stem, sizeof stem, "checkpoint-epoch-%04zu", epoch + 1);
      save_checkpoint(checkpoint_path(config.out_dir, stem), snapshot(epoch + 1));
    }
  }

  result.final_state = snapshot(epoch);
  if (!config.out_dir.empty()) save_checkpoint(checkpoint_path(config.out_dir, "checkpoint-final"), result.final_state);
  return result;
}

// ---------------------------------------------------------------------------
// Classification

ClassifierModel::ClassifierModel(ParamStore& store, const RunConfig& config, std::size_t num_classes)
    : config_(config), num_classes_(num_classes), backbone_([&]() -> PointMae {
        if (store.size() != 0) throw std::invalid_argument("ClassifierModel: parameter store must be empty");
        if (num_classes == 0) throw std::invalid_argument("ClassifierModel: need at least one class");
        Rng rng(derive_seed(config.seed, kClassifierInitTag));
        return PointMae(store, rng, config.model, config.patch_size, false);
      }()) {
  Rng rng(derive_seed(config.seed, kClassifierInitTag, 1));
  const std::size_t c = config.model.embed_dim;
  fc1_ = LinearLayer::create(store, rng, "cls.fc1", 2 * c, config.cls_hidden);
  fc2_ = LinearLayer::create(store, rng, "cls.fc2", config.cls_hidden, num_classes);
}

Var ClassifierModel::features(Graph& g, const ParamStore& store, const PointCloud& cloud,
                              std::uint64_t fps_seed) const {
  const PatchSet patches = build_patches(cloud, config_.num_patches, config_.patch_size, fps_seed);
  const Var tokens = backbone_.encode_all(g, store, patches, ForwardContext{});
  const Var parts[2] = {ops::max_pool_rows(tokens, patches.n), ops::mean_rows(tokens)};
  return ops::concat_cols(parts);
}

Var ClassifierModel::head(Graph& g, const ParamStore& store, const Var& features) const {
  return fc2_(g, store, ops::gelu(fc1_(g, store, features)));
}

Var ClassifierModel::logits(Graph& g, const ParamStore& store, const PointCloud& cloud,
                            std::uint64_t fps_seed) const {
  return head(g, store, features(g, store, cloud, fps_seed));
}

std::size_t ClassifierModel::predict(const ParamStore& store, const PointCloud& cloud, std::uint64_t fps_seed) const {
  Graph g;
  const Tensor& z = logits(g, store, cloud, fps_seed).value();
  std::size_t best = 0;
  for (std::size_t c = 1; c < z.numel(); ++c) {
    if (z[c] > z[best]) best = c;
  }
  return best;
}

double ClassifierModel::accuracy(const ParamStore& store, const std::vector<LabeledCloud>& items) const {
  if (items.empty()) return 0.0;
  std::vector<unsigned char> hit(items.size(), 0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < items.size(); ++i) {
    hit[i] = predict(store, items[i].cloud, eval_fps_seed(items[i])) == items[i].label ? 1 : 0;
  }
  const auto correct = std::count(hit.begin(), hit.end(), static_cast<unsigned char>(1));
  return static_cast<double>(correct) / static_cast<double>(items.size());
}

std::uint64_t eval_fps_seed(const LabeledCloud& item) { return derive_seed(item.seed, kEvalFpsTag); }

void load_encoder_weights(ParamStore& classifier, const Checkpoint& source, std::size_t num_classes,
                          bool with_head) {
  const bool same_head = with_head && source.kind == "classifier";
  if (same_head && source.num_classes != num_classes) {
    throw std::invalid_argument("class mismatch: checkpoint head has " + std::to_string(source.num_classes) +
                                " classes, dataset has " + std::to_string(num_classes));
  }
  auto encoder_part = [](const std::string& name) {
    return name.rfind("embed.", 0) == 0 || name.rfind("pe_encoder.", 0) == 0 || name.rfind("encoder.", 0) == 0;
  };
  std::size_t expected = 0;
  for (std::size_t i = 0; i < classifier.size(); ++i) expected += encoder_part(classifier.name(i)) ? 1 : 0;
  const std::size_t copied = copy_matching(classifier, source.params, encoder_part);
  if (copied != expected) {
    throw std::invalid_argument("checkpoint is missing encoder parameters (" + std::to_string(copied) + " of " +
                                std::to_string(expected) + " found)");
  }
  if (same_head) copy_matching(classifier, source.params, [](const std::string& n) { return n.rfind("cls.", 0) == 0; });
}

FinetuneResult finetune_classify(const RunConfig& config, const DatasetSplit& data,
                                 const std::optional<Checkpoint>& init) {
  config.validate();
  if (data.train.empty()) throw std::invalid_argument("finetune: empty training set");
  const std::size_t k = data.num_classes;

  ParamStore store;
  const ClassifierModel model(store, config, k);
  if (init) load_encoder_weights(store, *init, k);
  AdamW opt(store, AdamWConfig{config.weight_decay});

  const Schedule sched =
      make_schedule(data.train.size(), config.finetune_batch_size, config.finetune_epochs, config.finetune_warmup_epochs);
  MetricsLog log(config.out_dir, "finetune_metrics", false);

  FinetuneResult result;
  std::uint64_t step = 0;
  for (std::size_t epoch = 0; epoch < config.finetune_epochs; ++epoch) {
    const auto t0 = Clock::now();
    const auto order = shuffled_order(data.train.size(), derive_seed(config.seed, kFinetuneShuffleTag, epoch));
    double epoch_loss = 0.0;
    double lr = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.finetune_batch_size) {
      const std::size_t count = std::min(config.finetune_batch_size, order.size() - start);
      const std::uint64_t batch_seed = derive_seed(config.seed, kFinetuneBatchTag, step);
      lr = step_lr(sched, step, config.finetune_lr, config.min_lr);
      BatchResult br = batch_gradients(store, count, batch_seed, step, [&](Graph& g, std::size_t j) {
        const LabeledCloud& item = data.train[order[start + j]];
        const std::uint64_t item_seed = derive_seed(batch_seed, j);
        const PointCloud cloud = augment(item.cloud, derive_seed(item_seed, 0), config.augmentation);
        const std::size_t label = item.label;
        return ops::cross_entropy(model.logits(g, store, cloud, derive_seed(item_seed, 1)),
                                  std::span<const std::size_t>(&label, 1));
      });
      opt.step(store, br.grads, lr);
      ++step;
      epoch_loss += br.loss;
    }
    std::optional<double> val_acc;
    if (!data.val.empty()) val_acc = model.accuracy(store, data.val);
    EpochRecord rec{"finetune", epoch + 1, step, epoch_loss / static_cast<double>(sched.steps_per_epoch), lr, val_acc};
    log.write(rec, seconds_since(t0));
    result.epochs.push_back(rec);
  }

  result.test_accuracy = model.accuracy(store, data.test);
  Checkpoint& c = result.final_state;
  c.kind = "classifier";
  c.config = config;
  c.epoch = config.finetune_epochs;
  c.step = step;
  c.num_classes = k;
  c.params = std::move(store);
  c.optimizer = optimizer_state(opt);
  if (!config.out_dir.empty()) {
    save_checkpoint(checkpoint_path(config.out_dir, "classifier-final"), c);
  }
  return result;
}

}  // namespace pmae
