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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pmae/geometry/geometry.hpp"

namespace pmae {

enum class ShapeFamily { Sphere, Cube, Cylinder, Torus, Cone, Plane };

inline constexpr std::array<ShapeFamily, 6> kAllFamilies = {ShapeFamily::Sphere,   ShapeFamily::Cube,
                                                            ShapeFamily::Cylinder, ShapeFamily::Torus,
                                                            ShapeFamily::Cone,     ShapeFamily::Plane};

ShapeFamily parse_family(const std::string& name);
std::string to_string(ShapeFamily family);

struct SyntheticSpec {
  ShapeFamily family = ShapeFamily::Sphere;
  std::size_t points = 1024;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

/// Uniform surface sample of a randomly parameterized shape, plus Gaussian
/// noise, normalized to the unit sphere. The label is the family's index in
/// kAllFamilies.
PointCloud gen_synthetic(const SyntheticSpec& spec);

/// Centroid to the origin, then scale so the farthest point has norm 1.
PointCloud normalize_cloud(PointCloud cloud);

struct AugmentRanges {
  double scale_min = 0.8;
  double scale_max = 1.25;
  double translate = 0.1;
};

/// Seeded isotropic scale and per-axis translation (training only).
PointCloud augment(const PointCloud& cloud, std::uint64_t seed, const AugmentRanges& ranges = {});

/// x <- scale * x + translation.
PointCloud apply_similarity(const PointCloud& cloud, double scale, const Point3& translation);

struct LabeledCloud {
  PointCloud cloud;
  std::size_t label = 0;
  std::uint64_t seed = 0;
};

struct DatasetSplit {
  std::vector<LabeledCloud> pretrain;  // unlabeled pool; empty = pretrain on `train`
  std::vector<LabeledCloud> train;
  std::vector<LabeledCloud> val;
  std::vector<LabeledCloud> test;
  std::size_t num_classes = 0;
};

struct DatasetSpec {
  std::size_t num_classes = 6;  // first N families
  std::size_t train_per_class = 8;
  std::size_t val_per_class = 4;
  std::size_t test_per_class = 8;
  std::size_t pretrain_per_class = 0;  // separate self-supervised pool; 0 = none
  std::size_t points = 256;
  double noise = 0.01;
  std::uint64_t seed = 0;
};

/// Synthetic split; per-item seeds are derived from (seed, split, class,
/// index) so the splits never share a seed.
DatasetSplit make_synthetic_dataset(const DatasetSpec& spec);

/// The clouds masked-reconstruction pretraining runs on: the unlabeled pool
/// when there is one, otherwise the labeled training split.
const std::vector<LabeledCloud>& pretraining_pool(const DatasetSplit& split);

/// Whitespace-delimited XYZ text (extra columns ignored, '#' comments) or PLY
/// (ascii / binary_little_endian vertex x, y, z), chosen by extension.
PointCloud load_points(const std::string& path);
PointCloud load_xyz(const std::string& path);
PointCloud load_ply(const std::string& path);

void save_xyz(const std::string& path, const PointCloud& cloud);

struct ColoredCloud {
  PointCloud cloud;
  std::array<unsigned char, 3> rgb{200, 200, 200};
};

/// ASCII PLY with float x, y, z and uchar r, g, b; all clouds concatenated.
void save_ply(const std::string& path, const std::vector<ColoredCloud>& clouds);

}  // namespace pmae
