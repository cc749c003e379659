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

#include "pmae/masking/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pmae/numcore/rng.hpp"

namespace pmae {

MaskType parse_mask_type(const std::string& text) {
  if (text == "random") return MaskType::Random;
  if (text == "block") return MaskType::Block;
  throw std::invalid_argument("unknown mask type '" + text + "' (expected random|block)");
}

std::string to_string(MaskType type) { return type == MaskType::Random ? "random" : "block"; }

std::size_t masked_count(std::size_t n, double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw std::invalid_argument("mask ratio must lie in [0, 1]");
  // The small slack keeps exact halves such as 0.5 * 9 from rounding down
  // through representation error.
  const double scaled = ratio * static_cast<double>(n);
  return std::min(n, static_cast<std::size_t>(std::floor(scaled + 0.5 + 1e-9)));
}

namespace {

MaskSpec finish(std::size_t n, double ratio, std::uint64_t seed, std::vector<std::size_t> masked) {
  MaskSpec spec{n, ratio, seed, std::move(masked), {}};
  std::sort(spec.masked.begin(), spec.masked.end());
  std::vector<bool> is_masked(n, false);
  for (std::size_t i : spec.masked) is_masked[i] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_masked[i]) spec.visible.push_back(i);
  return spec;
}

}  // namespace

MaskSpec random_mask(std::size_t n, double ratio, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("random_mask: n must be positive");
  const std::size_t count = masked_count(n, ratio);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(perm[i], perm[j]);
  }
  perm.resize(count);
  return finish(n, ratio, seed, std::move(perm));
}

MaskSpec block_mask(const Tensor& centers, double ratio, std::uint64_t seed) {
  if (centers.cols() != 3 || centers.rank() != 2) {
    throw ShapeError("block_mask: centers must be n x 3, got " + shape_str(centers.shape()));
  }
  const std::size_t n = centers.rows();
  if (n == 0) throw std::invalid_argument("block_mask: n must be positive");
  const std::size_t count = masked_count(n, ratio);
  Rng rng(seed);
  const std::size_t anchor = rng.uniform_index(n);
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == anchor) continue;
    double d = 0.0;
    for (int t = 0; t < 3; ++t) {
      const double diff = centers[3 * i + t] - centers[3 * anchor + t];
      d += diff * diff;
    }
    order.emplace_back(d, i);
  }
  std::sort(order.begin(), order.end());
  std::vector<std::size_t> masked;
  if (count > 0) masked.push_back(anchor);
  for (std::size_t i = 0; masked.size() < count; ++i) masked.push_back(order[i].second);
  return finish(n, ratio, seed, std::move(masked));
}

MaskSpec make_mask(MaskType type, const Tensor& centers, double ratio, std::uint64_t seed) {
  return type == MaskType::Random ? random_mask(centers.rows(), ratio, seed) : block_mask(centers, ratio, seed);
}

namespace {

PatchSubset take(const PatchSet& ps, const std::vector<std::size_t>& idx) {
  PatchSubset out;
  out.original_index = idx;
  out.patches = Tensor(Shape{idx.size(), ps.k, 3});
  out.centers = Tensor(Shape{idx.size(), 3});
  const std::size_t stride = ps.k * 3;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= ps.n) {
      throw std::out_of_range("split_patches: patch index " + std::to_string(idx[i]) + " out of range for n=" +
                              std::to_string(ps.n));
    }
    std::copy_n(ps.patches.data() + idx[i] * stride, stride, out.patches.data() + i * stride);
    std::copy_n(ps.centers.data() + idx[i] * 3, 3, out.centers.data() + i * 3);
  }
  return out;
}

}  // namespace

SplitPatches split_patches(const PatchSet& patches, const MaskSpec& spec) {
  if (spec.n != patches.n) {
    throw std::invalid_argument("split_patches: mask covers " + std::to_string(spec.n) + " patches, set has " +
                                std::to_string(patches.n));
  }
  return {take(patches, spec.visible), take(patches, spec.masked)};
}

}  // namespace pmae
