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

#include <algorithm>
#include <cmath>

#include "golden.hpp"
#include "oracles.hpp"
#include "pmae/masking/masking.hpp"
#include "test_util.hpp"

using namespace pmae;

static void check_partition(const MaskSpec& s, std::size_t n, double ratio) {
  CHECK(s.masked.size() == masked_count(n, ratio));
  CHECK(s.masked.size() + s.visible.size() == n);
  CHECK(std::is_sorted(s.masked.begin(), s.masked.end()));
  CHECK(std::is_sorted(s.visible.begin(), s.visible.end()));
  std::vector<std::size_t> all = s.masked;
  all.insert(all.end(), s.visible.begin(), s.visible.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < n; ++i) CHECK(all[i] == i);
}

TEST_CASE("masked count rounds half up") {
  CHECK(masked_count(64, 0.6) == 38);
  CHECK(masked_count(8, 0.5) == 4);
  CHECK(masked_count(10, 0.25) == 3);  // 2.5 -> 3
  CHECK(masked_count(16, 0.6) == 10);  // 9.6 -> 10
  CHECK(masked_count(64, 0.0) == 0);
  CHECK(masked_count(64, 1.0) == 64);
  CHECK_THROWS(masked_count(8, 1.5));
  CHECK_THROWS(masked_count(8, -0.1));
}

TEST_CASE("random and block masks partition the patches") {
  Rng rng(1);
  for (std::size_t n : {1, 8, 16, 64}) {
    for (double m : {0.0, 0.4, 0.6, 0.8, 0.9, 1.0}) {
      check_partition(random_mask(n, m, 3), n, m);
      check_partition(block_mask(pmae::testing::random_tensor(rng, Shape{n, 3}), m, 3), n, m);
    }
  }
}

TEST_CASE("random masks are seeded and stable") {
  for (const auto& g : golden::random_masks()) CHECK(random_mask(g.n, g.ratio, g.seed).masked == g.masked);
  CHECK(random_mask(16, 0.6, 1).masked != random_mask(16, 0.6, 2).masked);
}

TEST_CASE("random mask marginals are uniform") {
  const std::size_t n = 16, trials = 4000;
  const double m = 0.6;
  std::vector<std::size_t> hits(n, 0);
  for (std::size_t s = 0; s < trials; ++s)
    for (std::size_t i : random_mask(n, m, s).masked) ++hits[i];
  const double p = static_cast<double>(masked_count(n, m)) / n;
  const double sigma = std::sqrt(trials * p * (1 - p));
  for (std::size_t h : hits) CHECK(std::abs(static_cast<double>(h) - trials * p) < 3.5 * sigma);
}

TEST_CASE("block mask is the seed patch and its nearest centers") {
  Tensor line(Shape{8, 3}, 0.0);
  for (std::size_t i = 0; i < 8; ++i) line.at(i, 0) = static_cast<double>(i);
  // Find a seed whose anchor is patch 0.
  std::uint64_t seed = 0;
  while (Rng(seed).uniform_index(8) != 0) ++seed;
  CHECK(block_mask(line, 0.5, seed).masked == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(block_mask(line, 1.0 / 8.0, seed).masked == std::vector<std::size_t>{0});

  Rng rng(5);
  const Tensor c16 = pmae::testing::random_tensor(rng, Shape{16, 3});
  CHECK(block_mask(c16, 0.4, 9).masked == golden::kBlockMask16);

  Rng r(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor c = pmae::testing::random_tensor(r, Shape{32, 3});
    const std::uint64_t s = r.next_u64();
    const MaskSpec spec = block_mask(c, 0.5, s);
    const std::size_t anchor = Rng(s).uniform_index(32);
    PointCloud pc;
    for (std::size_t i = 0; i < 32; ++i) pc.push_back({c.at(i, 0), c.at(i, 1), c.at(i, 2)});
    auto want = oracle::knn(pc, pc.point(anchor), spec.masked.size());
    std::sort(want.begin(), want.end());
    CHECK(spec.masked == want);
  }
}

TEST_CASE("split routes patches by index and reassembles") {
  Rng rng(4);
  const PointCloud cloud = pmae::testing::random_cloud(rng, 64);
  const PatchSet ps = build_patches(cloud, 16, 8, 1);
  const MaskSpec spec = random_mask(16, 0.6, 5);
  const SplitPatches sp = split_patches(ps, spec);
  CHECK(sp.masked.patches.shape() == Shape{10, 8, 3});
  CHECK(sp.visible.patches.shape() == Shape{6, 8, 3});
  for (const PatchSubset* part : {&sp.visible, &sp.masked}) {
    for (std::size_t i = 0; i < part->size(); ++i) {
      const std::size_t src = part->original_index[i];
      for (std::size_t j = 0; j < 8 * 3; ++j) CHECK(part->patches[i * 24 + j] == ps.patches[src * 24 + j]);
      for (std::size_t d = 0; d < 3; ++d) CHECK(part->centers.at(i, d) == ps.centers.at(src, d));
    }
  }
  const SplitPatches none = split_patches(ps, random_mask(16, 0.0, 5));
  CHECK(none.visible.patches == ps.patches);
  CHECK(none.masked.size() == 0);

  MaskSpec bad = spec;
  bad.masked.back() = 99;
  CHECK_THROWS(split_patches(ps, bad));
  CHECK_THROWS(split_patches(ps, random_mask(8, 0.5, 1)));
}

TEST_CASE("mask types parse") {
  CHECK(parse_mask_type("block") == MaskType::Block);
  CHECK(to_string(MaskType::Random) == "random");
  CHECK_THROWS(parse_mask_type("stripes"));
}
