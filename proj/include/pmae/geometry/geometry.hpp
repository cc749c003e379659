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
#include <optional>
#include <span>
#include <vector>

#include "pmae/numcore/autograd.hpp"
#include "pmae/numcore/gradcheck.hpp"
#include "pmae/numcore/tensor.hpp"

namespace pmae {

using Point3 = std::array<double, 3>;

/// p x 3 coordinates plus an optional class label.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Point3> points, std::optional<std::size_t> label = std::nullopt);

  std::size_t size() const noexcept { return coords_.size() / 3; }
  bool empty() const noexcept { return coords_.empty(); }

  Point3 point(std::size_t i) const { return {coords_[3 * i], coords_[3 * i + 1], coords_[3 * i + 2]}; }
  void set_point(std::size_t i, const Point3& p);
  void push_back(const Point3& p);

  std::span<const double> coords() const noexcept { return coords_; }
  std::span<double> coords() noexcept { return coords_; }

  /// Copy as a p x 3 tensor.
  Tensor to_tensor() const;

  std::optional<std::size_t> label;

 private:
  std::vector<double> coords_;
};

/// n patches of k points around FPS centers, stored as offsets from their center.
struct PatchSet {
  std::size_t n = 0;
  std::size_t k = 0;
  Tensor centers;                          // n x 3
  Tensor patches;                          // n x k x 3, center-normalized
  std::vector<std::size_t> center_indices;  // n source indices
  std::vector<std::size_t> point_indices;   // n*k source indices, row-major

  std::size_t point_index(std::size_t patch, std::size_t j) const { return point_indices[patch * k + j]; }
};

/// Greedy max-min sampling starting from a seeded uniformly chosen point.
std::vector<std::size_t> farthest_point_sampling(const PointCloud& cloud, std::size_t n, std::uint64_t seed);

/// Greedy max-min sampling from an explicit first index. Each next pick
/// maximizes the squared distance to the selected set; ties go to the lowest
/// index.
std::vector<std::size_t> farthest_point_sampling_from(const PointCloud& cloud, std::size_t n, std::size_t first);

/// k nearest source points per center (n x 3), ascending by squared distance,
/// ties by lowest index. Returns n*k indices, row-major.
std::vector<std::size_t> knn(const PointCloud& cloud, const Tensor& centers, std::size_t k);

/// FPS, then KNN, then subtract each center from its patch points.
PatchSet build_patches(const PointCloud& cloud, std::size_t n, std::size_t k, std::uint64_t seed);

/// l2 Chamfer distance between a x 3 and b x 3 point sets:
/// mean_a min_b |a-b|^2 + mean_b min_a |a-b|^2.
double chamfer_l2(const Tensor& pred, const Tensor& gt);

/// Differentiable (w.r.t. pred) Chamfer distance. Nearest-neighbour ties
/// route the subgradient to the lowest index.
Var chamfer_l2(const Var& pred, const Tensor& gt);

/// Mean per-patch Chamfer over aligned count x a x 3 / count x b x 3 patch
/// stacks. Zero patches yield a constant 0.
Var batch_chamfer(const Var& pred_patches, const Tensor& gt_patches);

/// Finite-difference cases for chamfer_l2 and batch_chamfer (gradient with
/// respect to the prediction; the target is fixed per case).
std::vector<GradcheckCase> geometry_gradcheck_cases();

namespace serial {

std::vector<std::size_t> farthest_point_sampling_from(const PointCloud& cloud, std::size_t n, std::size_t first);
std::vector<std::size_t> knn(const PointCloud& cloud, const Tensor& centers, std::size_t k);

}  // namespace serial

}  // namespace pmae
