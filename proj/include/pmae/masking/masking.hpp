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
#include <string>
#include <vector>

#include "pmae/geometry/geometry.hpp"

namespace pmae {

enum class MaskType { Random, Block };

MaskType parse_mask_type(const std::string& text);
std::string to_string(MaskType type);

/// Partition of patch indices 0..n-1 into masked and visible sets.
struct MaskSpec {
  std::size_t n = 0;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> masked;   // sorted
  std::vector<std::size_t> visible;  // sorted
};

/// round_half_up(ratio * n); ratio must lie in [0, 1].
std::size_t masked_count(std::size_t n, double ratio);

/// Uniformly random subset of size masked_count(n, ratio) via a seeded
/// Fisher-Yates prefix.
MaskSpec random_mask(std::size_t n, double ratio, std::uint64_t seed);

/// A uniformly chosen seed patch plus its nearest patches by center distance
/// (ties by lowest index), masked_count(n, ratio) in total.
MaskSpec block_mask(const Tensor& centers, double ratio, std::uint64_t seed);

MaskSpec make_mask(MaskType type, const Tensor& centers, double ratio, std::uint64_t seed);

/// Patch subset in the order of `original_index`.
struct PatchSubset {
  Tensor patches;  // count x k x 3
  Tensor centers;  // count x 3
  std::vector<std::size_t> original_index;

  std::size_t size() const noexcept { return original_index.size(); }
};

struct SplitPatches {
  PatchSubset visible;
  PatchSubset masked;  // reconstruction ground truth, kept verbatim
};

SplitPatches split_patches(const PatchSet& patches, const MaskSpec& spec);

}  // namespace pmae
