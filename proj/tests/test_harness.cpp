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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "pmae/harness/experiments.hpp"
#include "pmae/harness/train.hpp"

using namespace pmae;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_config() {
  RunConfig c = RunConfig::desk();
  c.model.embed_dim = 16;
  c.model.encoder_depth = 1;
  c.model.decoder_depth = 1;
  c.model.heads = 2;
  c.model.mlp_ratio = 2.0;
  c.model.pointnet = {8, 16, 16};
  c.model.pos_hidden = 8;
  c.points = c.data.points = 64;
  c.num_patches = 8;
  c.patch_size = 8;
  c.epochs = 4;
  c.warmup_epochs = 1;
  c.batch_size = 4;
  c.finetune_epochs = 2;
  c.finetune_batch_size = 4;
  c.finetune_warmup_epochs = 1;
  c.cls_hidden = 8;
  c.fewshot_steps = 20;
  c.data.train_per_class = 2;
  c.data.val_per_class = 1;
  c.data.test_per_class = 2;
  c.data.pretrain_per_class = 0;
  return c;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pmae_harness_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t count_lines(const fs::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

}  // namespace

TEST_CASE("config survives a json round trip and rejects bad values") {
  RunConfig c = tiny_config();
  c.mask_type = MaskType::Block;
  c.model.placement = MaskTokenPlacement::Encoder;
  c.seed = 1234567890123ULL;
  c.lr = 1.0 / 3.0;
  const RunConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.lr == c.lr);

  const RunConfig partial = config_from_json(nlohmann::json{{"mask_ratio", 0.8}}, c);
  CHECK(partial.mask_ratio == 0.8);
  CHECK(partial.patch_size == c.patch_size);

  CHECK(RunConfig::paper().points == 1024);
  CHECK(RunConfig::paper().num_patches == 64);
  CHECK(RunConfig::paper().patch_size == 32);
  CHECK(RunConfig::preset("desk").points == RunConfig::desk().points);
  CHECK_THROWS(RunConfig::preset("huge"));

  RunConfig bad = c;
  bad.mask_ratio = 1.2;
  CHECK_THROWS(bad.validate());
  bad = c;
  bad.num_patches = c.points + 1;
  CHECK_THROWS(bad.validate());
  bad = c;
  bad.model.heads = 3;  // 16 not divisible by 3
  CHECK_THROWS(bad.validate());
}

TEST_CASE("metrics log enforces increasing epochs and keeps timing separate") {
  const fs::path dir = scratch_dir("metrics");
  {
    MetricsLog log(dir.string(), "metrics", false);
    log.write({"pretrain", 1, 4, 0.05, 1e-3, {}}, 0.5);
    log.write({"pretrain", 2, 8, 0.04, 1e-3, {}}, 0.5);
    CHECK_THROWS(log.write({"pretrain", 2, 12, 0.04, 1e-3, {}}, 0.5));
  }
  CHECK(count_lines(dir / "metrics.jsonl") == 2);
  CHECK(count_lines(dir / "metrics.timing.jsonl") == 2);
  std::ifstream in(dir / "metrics.jsonl");
  std::string first;
  std::getline(in, first);
  const auto j = nlohmann::json::parse(first);
  CHECK(j.at("loss_x1000").get<double>() == doctest::Approx(50.0));
  CHECK(!j.contains("wall_seconds"));
  CHECK(!to_json(EpochRecord{"finetune", 1, 1, 0.5, 1e-3, 0.75}).contains("loss_x1000"));
}

TEST_CASE("checkpoint round trip is bit-exact") {
  const RunConfig c = tiny_config();
  const DatasetSplit data = make_synthetic_dataset(c.data);
  RunConfig run = c;
  run.epochs = 1;
  const PretrainResult r = pretrain(run, data.train);
  const fs::path dir = scratch_dir("ckpt");
  const std::string path = (dir / "a.pmae").string();
  save_checkpoint(path, r.final_state);
  const Checkpoint back = load_checkpoint(path);
  CHECK(back.kind == "pretrain");
  CHECK(back.epoch == 1);
  CHECK(back.step == r.final_state.step);
  CHECK(back.params == r.final_state.params);
  REQUIRE(back.optimizer.has_value());
  CHECK(back.optimizer->step == r.final_state.optimizer->step);
  for (std::size_t i = 0; i < back.optimizer->m.size(); ++i) {
    CHECK(back.optimizer->m[i] == r.final_state.optimizer->m[i]);
    CHECK(back.optimizer->v[i] == r.final_state.optimizer->v[i]);
  }
  CHECK(to_json(back.config) == to_json(run));

  std::ofstream(dir / "junk.pmae") << "not a checkpoint";
  CHECK_THROWS(load_checkpoint((dir / "junk.pmae").string()));
  CHECK_THROWS(load_checkpoint((dir / "missing.pmae").string()));
}

TEST_CASE("zero epochs yield the seeded initial parameters") {
  RunConfig c = tiny_config();
  c.epochs = 0;
  const DatasetSplit data = make_synthetic_dataset(c.data);
  const PretrainResult r = pretrain(c, data.train);
  CHECK(r.final_state.params == init_pretrain_params(c));
  CHECK(r.epochs.empty());
  CHECK(r.final_state.step == 0);
}

TEST_CASE("pretraining is deterministic and resumable") {
  RunConfig c = tiny_config();
  c.out_dir = scratch_dir("full").string();
  c.checkpoint_every = 2;
  const DatasetSplit data = make_synthetic_dataset(c.data);
  const PretrainResult full = pretrain(c, data.train);
  CHECK(full.epochs.size() == 4);
  CHECK(fs::exists(fs::path(c.out_dir) / "checkpoint-epoch-0002.pmae"));
  CHECK(fs::exists(fs::path(c.out_dir) / "checkpoint-final.pmae"));
  CHECK(count_lines(fs::path(c.out_dir) / "metrics.jsonl") == 4);

  RunConfig again = c;
  again.out_dir.clear();
  const PretrainResult rerun = pretrain(again, data.train);
  CHECK(rerun.step_losses == full.step_losses);
  CHECK(rerun.final_state.params == full.final_state.params);

  RunConfig split = c;
  split.out_dir = scratch_dir("split").string();
  PretrainOptions first;
  first.stop_after_epoch = 2;
  const PretrainResult head = pretrain(split, data.train, first);
  CHECK(head.final_state.epoch == 2);
  PretrainOptions second;
  second.resume = load_checkpoint((fs::path(split.out_dir) / "checkpoint-final.pmae").string());
  const PretrainResult tail = pretrain(split, data.train, second);
  std::vector<double> joined = head.step_losses;
  joined.insert(joined.end(), tail.step_losses.begin(), tail.step_losses.end());
  CHECK(joined == full.step_losses);
  CHECK(tail.final_state.params == full.final_state.params);
  CHECK(count_lines(fs::path(split.out_dir) / "metrics.jsonl") == 4);

  RunConfig other = again;
  other.seed = 99;
  CHECK(pretrain(other, data.train).step_losses != full.step_losses);
}

TEST_CASE("fine-tuning: single class is trivially perfect, class mismatch is rejected") {
  RunConfig c = tiny_config();
  c.data.num_classes = 1;
  const DatasetSplit one = make_synthetic_dataset(c.data);
  const FinetuneResult r = finetune_classify(c, one, std::nullopt);
  CHECK(r.test_accuracy == 1.0);
  CHECK(r.final_state.kind == "classifier");
  CHECK(r.final_state.num_classes == 1);
  CHECK(r.epochs.size() == c.finetune_epochs);

  RunConfig c3 = tiny_config();
  c3.data.num_classes = 3;
  const DatasetSplit three = make_synthetic_dataset(c3.data);
  CHECK_THROWS_WITH_AS(finetune_classify(c3, three, r.final_state), doctest::Contains("class mismatch"),
                       std::invalid_argument);

  // Encoder weights from a pretrain checkpoint are accepted for any class count.
  RunConfig pc = c3;
  pc.epochs = 1;
  const PretrainResult pre = pretrain(pc, three.train);
  const FinetuneResult a = finetune_classify(c3, three, pre.final_state);
  const FinetuneResult b = finetune_classify(c3, three, pre.final_state);
  CHECK(a.test_accuracy == b.test_accuracy);
  CHECK(a.final_state.params == b.final_state.params);
  CHECK(a.test_accuracy >= 0.0);
  CHECK(a.test_accuracy <= 1.0);
}

TEST_CASE("few-shot evaluation") {
  RunConfig c = tiny_config();
  c.data.num_classes = 3;
  c.data.train_per_class = 4;
  const DatasetSplit data = make_synthetic_dataset(c.data);

  FewshotOptions opt;
  opt.n_way = 1;
  opt.m_shot = 1;
  opt.runs = 3;
  opt.test_per_class = 2;
  const FewshotResult single = fewshot_eval(c, std::nullopt, data.train, opt);
  for (double a : single.accuracies) CHECK(a == 1.0);

  opt.n_way = 3;
  opt.runs = 1;
  const FewshotResult one_run = fewshot_eval(c, std::nullopt, data.train, opt);
  CHECK(one_run.accuracies.size() == 1);
  CHECK(one_run.stddev == 0.0);

  opt.runs = 3;
  const FewshotResult x = fewshot_eval(c, std::nullopt, data.train, opt);
  const FewshotResult y = fewshot_eval(c, std::nullopt, data.train, opt);
  CHECK(x.accuracies == y.accuracies);
  CHECK(x.mean == y.mean);

  opt.test_per_class = 4;  // 1 + 4 > 4 items per class
  CHECK_THROWS_WITH(fewshot_eval(c, std::nullopt, data.train, opt), doctest::Contains("class 0"));
  opt.test_per_class = 2;
  opt.n_way = 4;
  CHECK_THROWS(fewshot_eval(c, std::nullopt, data.train, opt));
}

TEST_CASE("a one-cell ablation equals a direct run with the cell seed") {
  RunConfig c = tiny_config();
  c.epochs = 2;
  c.finetune_epochs = 1;
  const DatasetSplit data = make_synthetic_dataset(c.data);
  const AblationCell cell{MaskType::Block, 0.4, MaskTokenPlacement::Decoder, true};
  const auto rows = ablate_mask(c, data, {cell});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].seed == ablation_cell_seed(c.seed, 0));

  RunConfig direct = c;
  direct.seed = rows[0].seed;
  direct.mask_type = MaskType::Block;
  direct.mask_ratio = 0.4;
  const PretrainResult pre = pretrain(direct, data.train);
  CHECK(rows[0].loss_x1000 == pre.epochs.back().loss_x1000());
  REQUIRE(rows[0].accuracy.has_value());
  CHECK(*rows[0].accuracy == finetune_classify(direct, data, pre.final_state).test_accuracy);

  CHECK(ablation_cell_seed(c.seed, 0) != ablation_cell_seed(c.seed, 1));
  CHECK(default_ablation_grid().size() == 7);
  const std::string table = format_ablation_table(rows);
  CHECK(table.find("block") != std::string::npos);
}

TEST_CASE("reconstruction export") {
  RunConfig c = tiny_config();
  c.epochs = 1;
  const DatasetSplit data = make_synthetic_dataset(c.data);
  const PretrainResult pre = pretrain(c, data.train);
  const PointCloud& cloud = data.test[0].cloud;

  const ReconstructionResult none = reconstruct(pre.final_state, cloud, 0.0, MaskType::Random, 1, "");
  CHECK(none.masked_patches == 0);
  CHECK(none.masked_view.to_tensor() == cloud.to_tensor());
  CHECK(none.reconstruction.to_tensor() == cloud.to_tensor());
  CHECK(none.chamfer_reconstruction == 0.0);

  const fs::path dir = scratch_dir("recon");
  const ReconstructionResult r = reconstruct(pre.final_state, cloud, 0.5, MaskType::Random, 2, dir.string());
  CHECK(r.masked_patches == 4);
  CHECK(r.predicted.size() == 4 * c.patch_size);
  CHECK(r.reconstruction.size() == r.masked_view.size() + r.predicted.size());
  CHECK(r.baseline.size() == r.reconstruction.size());
  CHECK(r.masked_view.size() < cloud.size());
  CHECK(r.files.size() == 3);
  CHECK(load_points((dir / "input.ply").string()).size() == cloud.size());
  CHECK(load_points((dir / "masked.ply").string()).size() == r.masked_view.size());
  CHECK(load_points((dir / "reconstruction.ply").string()).size() == r.reconstruction.size());

  CHECK_THROWS(reconstruct(pre.final_state, cloud, 1.5, MaskType::Random, 2, ""));
  Checkpoint cls = pre.final_state;
  cls.kind = "classifier";
  CHECK_THROWS(reconstruct(cls, cloud, 0.5, MaskType::Random, 2, ""));
}
