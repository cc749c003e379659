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

#include <filesystem>
#include <stdexcept>

#include "pmae/harness/experiments.hpp"

namespace pmae {

namespace {

Tensor as_tensor(const PointCloud& cloud) {
  return cloud.empty() ? Tensor(Shape{0, 3}) : cloud.to_tensor();
}

}  // namespace

ReconstructionResult reconstruct(const Checkpoint& autoencoder, const PointCloud& cloud, double ratio,
                                 MaskType type, std::uint64_t seed, const std::string& out_dir) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw std::invalid_argument("reconstruct: ratio must lie in [0, 1]");
  if (autoencoder.kind != "pretrain") {
    throw std::invalid_argument("reconstruct: needs a pretraining checkpoint, got '" + autoencoder.kind + "'");
  }
  const RunConfig& cfg = autoencoder.config;
  ParamStore store;
  Rng rng(0);
  const PointMae model(store, rng, cfg.model, cfg.patch_size);
  if (copy_matching(store, autoencoder.params, [](const std::string&) { return true; }) != store.size()) {
    throw std::invalid_argument("reconstruct: checkpoint does not match its model config");
  }

  Graph g;
  const PretrainOutput out = model.pretrain_forward(g, store, cloud, cfg.num_patches, ratio, type, seed, ForwardContext{});
  const PatchSet& patches = out.patches;
  const std::size_t k = patches.k;

  std::vector<char> hidden(cloud.size(), 0);
  for (std::size_t m : out.mask.masked) {
    for (std::size_t j = 0; j < k; ++j) hidden[patches.point_index(m, j)] = 1;
  }

  ReconstructionResult r;
  r.input = cloud;
  r.masked_patches = out.mask.masked.size();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!hidden[i]) r.masked_view.push_back(cloud.point(i));
  }
  r.reconstruction = r.masked_view;
  r.baseline = r.masked_view;
  const Tensor& pred = out.predicted.value();
  for (std::size_t t = 0; t < out.mask.masked.size(); ++t) {
    const std::size_t m = out.mask.masked[t];
    const Point3 c{patches.centers.at(m, 0), patches.centers.at(m, 1), patches.centers.at(m, 2)};
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t base = (t * k + j) * 3;
      const Point3 p{pred[base] + c[0], pred[base + 1] + c[1], pred[base + 2] + c[2]};
      r.predicted.push_back(p);
      r.reconstruction.push_back(p);
      r.baseline.push_back(c);
    }
  }

  const Tensor input = as_tensor(cloud);
  r.chamfer_reconstruction = chamfer_l2(as_tensor(r.reconstruction), input);
  r.chamfer_baseline = chamfer_l2(as_tensor(r.baseline), input);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::array<unsigned char, 3> grey{170, 170, 170}, blue{70, 110, 220}, red{225, 60, 45};
    r.files = {out_dir + "/input.ply", out_dir + "/masked.ply", out_dir + "/reconstruction.ply"};
    save_ply(r.files[0], {{r.input, grey}});
    save_ply(r.files[1], {{r.masked_view, blue}});
    save_ply(r.files[2], {{r.masked_view, grey}, {r.predicted, red}});
  }
  return r;
}

}  // namespace pmae
