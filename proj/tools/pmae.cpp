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

// Command-line front end: pretraining, fine-tuning, few-shot evaluation,
// masking ablations, reconstruction export, gradient checks and data export.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmae/geometry/geometry.hpp"
#include "pmae/harness/experiments.hpp"

namespace {

using namespace pmae;

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct CommonFlags {
  std::string preset = "desk";
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> mask_ratio;
  std::string mask_type;
  std::string mask_tokens_at;
  std::string out;
  std::optional<std::size_t> epochs;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--preset", f.preset, "Base configuration: desk | paper")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--config", f.config_path, "JSON file overriding RunConfig fields")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--mask-ratio", f.mask_ratio, "Masking ratio in [0, 1]");
  cmd->add_option("--mask-type", f.mask_type, "random | block")->check(CLI::IsMember({"random", "block"}));
  cmd->add_option("--mask-tokens-at", f.mask_tokens_at, "decoder | encoder")
      ->check(CLI::IsMember({"decoder", "encoder"}));
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--epochs", f.epochs, "Override the number of epochs");
}

RunConfig resolve(const CommonFlags& f, RunConfig base) {
  RunConfig c = f.config_path.empty() ? std::move(base) : load_config_file(f.config_path, std::move(base));
  if (f.seed) c.seed = *f.seed;
  if (f.mask_ratio) c.mask_ratio = *f.mask_ratio;
  if (!f.mask_type.empty()) c.mask_type = parse_mask_type(f.mask_type);
  if (!f.mask_tokens_at.empty()) c.model.placement = parse_placement(f.mask_tokens_at);
  if (!f.out.empty()) c.out_dir = f.out;
  c.validate();
  return c;
}

RunConfig resolve(const CommonFlags& f) { return resolve(f, RunConfig::preset(f.preset)); }

void write_json(const std::string& dir, const std::string& name, const nlohmann::json& j) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name);
  out << j.dump(2) << '\n';
}

int cmd_pretrain(const CommonFlags& f, const std::string& resume) {
  PretrainOptions opt;
  RunConfig cfg;
  if (!resume.empty()) {
    opt.resume = load_checkpoint(resume);
    cfg = resolve(f, opt.resume->config);  // the checkpoint's config is the base
  } else {
    cfg = resolve(f);
  }
  if (f.epochs) cfg.epochs = *f.epochs;
  write_json(cfg.out_dir, "config.json", to_json(cfg));
  const DatasetSplit data = make_synthetic_dataset(cfg.data);
  const PretrainResult r = pretrain(cfg, pretraining_pool(data), opt);
  for (const EpochRecord& e : r.epochs) {
    std::printf("epoch %4zu  loss(x1000) %10.4f  lr %.3e\n", e.epoch, e.loss_x1000(), e.lr);
  }
  if (!cfg.out_dir.empty()) std::printf("checkpoint: %s/checkpoint-final.pmae\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_finetune(const CommonFlags& f, const std::string& checkpoint) {
  std::optional<Checkpoint> init;
  RunConfig cfg;
  if (!checkpoint.empty()) {
    init = load_checkpoint(checkpoint);
    cfg = resolve(f, init->config);
  } else {
    cfg = resolve(f);
  }
  if (f.epochs) cfg.finetune_epochs = *f.epochs;
  const DatasetSplit data = make_synthetic_dataset(cfg.data);
  const FinetuneResult r = finetune_classify(cfg, data, init);
  for (const EpochRecord& e : r.epochs) {
    std::printf("epoch %4zu  loss %.5f  val %.2f%%\n", e.epoch, e.loss, 100.0 * e.accuracy.value_or(0.0));
  }
  std::printf("test accuracy: %.2f%% (%s)\n", 100.0 * r.test_accuracy, init ? "pretrained init" : "scratch");
  write_json(cfg.out_dir, "finetune_result.json",
             {{"test_accuracy", r.test_accuracy}, {"init", init ? checkpoint : std::string("scratch")}});
  return 0;
}

int cmd_fewshot(const CommonFlags& f, const std::string& checkpoint, FewshotOptions opt) {
  std::optional<Checkpoint> enc;
  RunConfig cfg;
  if (!checkpoint.empty()) {
    enc = load_checkpoint(checkpoint);
    cfg = resolve(f, enc->config);
  } else {
    cfg = resolve(f);
  }
  opt.seed = cfg.seed;
  DatasetSpec pool_spec = cfg.data;
  pool_spec.train_per_class = opt.m_shot + opt.test_per_class;
  pool_spec.pretrain_per_class = 0;
  const DatasetSplit pool = make_synthetic_dataset(pool_spec);
  const FewshotResult r = fewshot_eval(cfg, enc, pool.train, opt);
  std::printf("%zu-way %zu-shot over %zu runs: %.2f%% +/- %.2f\n", opt.n_way, opt.m_shot, opt.runs, 100.0 * r.mean,
              100.0 * r.stddev);
  write_json(cfg.out_dir, "fewshot_result.json",
             {{"n_way", opt.n_way}, {"m_shot", opt.m_shot}, {"runs", opt.runs}, {"mean", r.mean},
              {"std", r.stddev}, {"accuracies", r.accuracies}});
  return 0;
}

int cmd_ablate(const CommonFlags& f, const std::vector<double>& ratios, const std::vector<std::string>& types,
               bool with_encoder_cell, bool finetune) {
  RunConfig cfg = resolve(f);
  if (f.epochs) cfg.epochs = *f.epochs;
  std::vector<AblationCell> cells;
  for (const std::string& t : types) {
    for (double r : ratios) cells.push_back({parse_mask_type(t), r, MaskTokenPlacement::Decoder, finetune});
  }
  if (with_encoder_cell) cells.push_back({MaskType::Random, cfg.mask_ratio, MaskTokenPlacement::Encoder, finetune});
  const DatasetSplit data = make_synthetic_dataset(cfg.data);
  const auto rows = ablate_mask(cfg, data, cells);
  const std::string table = format_ablation_table(rows);
  std::cout << table;
  if (!cfg.out_dir.empty()) {
    std::ofstream(cfg.out_dir + "/ablation.txt") << table;
  }
  return 0;
}

int cmd_reconstruct(const CommonFlags& f, const std::string& checkpoint, const std::string& input,
                    const std::string& family, std::uint64_t shape_seed) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const RunConfig cfg = resolve(f, ckpt.config);
  PointCloud cloud;
  if (!input.empty()) {
    cloud = normalize_cloud(load_points(input));
  } else {
    cloud = gen_synthetic({parse_family(family), cfg.points, cfg.data.noise, shape_seed});
  }
  const std::string out = cfg.out_dir.empty() ? std::string("reconstruction") : cfg.out_dir;
  const ReconstructionResult r = reconstruct(ckpt, cloud, cfg.mask_ratio, cfg.mask_type, cfg.seed, out);
  std::printf("masked patches: %zu of %zu\n", r.masked_patches, cfg.num_patches);
  std::printf("chamfer(reconstruction, input) = %.6e\n", r.chamfer_reconstruction);
  std::printf("chamfer(centers-only baseline, input) = %.6e\n", r.chamfer_baseline);
  for (const std::string& file : r.files) std::printf("wrote %s\n", file.c_str());
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, std::size_t trials) {
  std::vector<GradcheckCase> cases = numcore_gradcheck_cases();
  for (GradcheckCase& c : geometry_gradcheck_cases()) cases.push_back(std::move(c));
  GradcheckOptions opt;
  opt.trials = trials;
  bool ok = true;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const GradcheckResult r = run_gradcheck(cases[i], derive_seed(seed, i), opt);
    std::printf("%-4s %-22s trials %-3zu max rel err %.3e\n", r.passed ? "ok" : "FAIL", r.name.c_str(), r.trials,
                r.max_rel_error);
    ok = ok && r.passed;
  }
  return ok ? 0 : kExitNumerical;
}

int cmd_gen_data(const CommonFlags& f) {
  RunConfig cfg = resolve(f);
  if (f.seed) cfg.data.seed = *f.seed;
  const std::string out = cfg.out_dir.empty() ? std::string("data") : cfg.out_dir;
  const DatasetSplit data = make_synthetic_dataset(cfg.data);
  nlohmann::json manifest = {{"num_classes", data.num_classes}, {"points", cfg.data.points}, {"items", nlohmann::json::array()}};
  auto dump = [&](const std::vector<LabeledCloud>& items, const std::string& split) {
    std::filesystem::create_directories(out + "/" + split);
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string name = split + "/" + to_string(kAllFamilies[items[i].label]) + "_" + std::to_string(i) + ".xyz";
      save_xyz(out + "/" + name, items[i].cloud);
      manifest["items"].push_back({{"file", name}, {"split", split}, {"label", items[i].label}, {"seed", items[i].seed}});
    }
  };
  dump(data.pretrain, "pretrain");
  dump(data.train, "train");
  dump(data.val, "val");
  dump(data.test, "test");
  std::ofstream(out + "/manifest.json") << manifest.dump(2) << '\n';
  const std::size_t total = data.pretrain.size() + data.train.size() + data.val.size() + data.test.size();
  std::printf("wrote %zu clouds to %s\n", total, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pmae: masked autoencoding for point clouds"};
  app.require_subcommand(1);

  CommonFlags pre_f, ft_f, fs_f, ab_f, rc_f, gd_f;
  std::string resume, ft_ckpt, fs_ckpt, rc_ckpt, rc_input, rc_family = "torus";
  std::uint64_t rc_shape_seed = 0, gc_seed = 0;
  std::size_t gc_trials = 10;
  FewshotOptions fs_opt;
  std::vector<double> ab_ratios{0.4, 0.6, 0.8};
  std::vector<std::string> ab_types{"random"};
  bool ab_encoder = true, ab_no_finetune = false;

  auto* pre = app.add_subcommand("pretrain", "Masked-reconstruction pretraining");
  add_common(pre, pre_f);
  pre->add_option("--resume", resume, "Continue from a pretraining checkpoint")->check(CLI::ExistingFile);

  auto* ft = app.add_subcommand("finetune", "Classification fine-tuning (scratch without --checkpoint)");
  add_common(ft, ft_f);
  ft->add_option("--checkpoint", ft_ckpt, "Pretrained or classifier checkpoint")->check(CLI::ExistingFile);

  auto* fs = app.add_subcommand("fewshot", "n-way m-shot evaluation on frozen features");
  add_common(fs, fs_f);
  fs->add_option("--checkpoint", fs_ckpt, "Encoder checkpoint")->check(CLI::ExistingFile);
  fs->add_option("--n-way", fs_opt.n_way, "Classes per episode");
  fs->add_option("--m-shot", fs_opt.m_shot, "Support items per class");
  fs->add_option("--runs", fs_opt.runs, "Independent episodes");
  fs->add_option("--test-per-class", fs_opt.test_per_class, "Query items per class");

  auto* ab = app.add_subcommand("ablate-mask", "Masking type / ratio / mask-token placement ablation");
  add_common(ab, ab_f);
  ab->add_option("--ratios", ab_ratios, "Mask ratios")->delimiter(',');
  ab->add_option("--types", ab_types, "Mask types")->delimiter(',');
  ab->add_flag("!--no-encoder-cell", ab_encoder, "Skip the encoder-placement cell");
  ab->add_flag("--no-finetune", ab_no_finetune, "Report pretraining loss only");

  auto* rc = app.add_subcommand("reconstruct", "Export input / masked / reconstruction PLY files");
  add_common(rc, rc_f);
  rc->add_option("--checkpoint", rc_ckpt, "Pretraining checkpoint")->required()->check(CLI::ExistingFile);
  rc->add_option("--input", rc_input, "XYZ or PLY point cloud (default: a synthetic shape)")->check(CLI::ExistingFile);
  rc->add_option("--family", rc_family, "Synthetic family when no --input is given");
  rc->add_option("--shape-seed", rc_shape_seed, "Seed of the synthetic shape");

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of every differentiable op");
  gc->add_option("--seed", gc_seed, "Seed");
  gc->add_option("--trials", gc_trials, "Random inputs per op");

  auto* gd = app.add_subcommand("gen-data", "Write the synthetic dataset as XYZ files");
  add_common(gd, gd_f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*pre) return cmd_pretrain(pre_f, resume);
    if (*ft) return cmd_finetune(ft_f, ft_ckpt);
    if (*fs) return cmd_fewshot(fs_f, fs_ckpt, fs_opt);
    if (*ab) return cmd_ablate(ab_f, ab_ratios, ab_types, ab_encoder, !ab_no_finetune);
    if (*rc) return cmd_reconstruct(rc_f, rc_ckpt, rc_input, rc_family, rc_shape_seed);
    if (*gc) return cmd_gradcheck(gc_seed, gc_trials);
    if (*gd) return cmd_gen_data(gd_f);
  } catch (const TrainingAborted& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
