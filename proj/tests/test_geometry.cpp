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

#include "oracles.hpp"
#include "pmae/geometry/geometry.hpp"
#include "pmae/numcore/ops.hpp"
#include "test_util.hpp"

using namespace pmae;
using pmae::testing::random_cloud;
using pmae::testing::random_tensor;

TEST_CASE("fps matches the greedy max-min oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const PointCloud cloud = random_cloud(rng, 8 + rng.uniform_index(57));
    const std::size_t n = 1 + rng.uniform_index(cloud.size());
    const std::size_t first = rng.uniform_index(cloud.size());
    CHECK(farthest_point_sampling_from(cloud, n, first) == oracle::fps(cloud, n, first));
    CHECK(serial::farthest_point_sampling_from(cloud, n, first) == oracle::fps(cloud, n, first));
  }
}

TEST_CASE("seeded fps starts from Rng(seed).uniform_index(p)") {
  Rng rng(2);
  const PointCloud cloud = random_cloud(rng, 40);
  const auto s = farthest_point_sampling(cloud, 5, 99);
  CHECK(s.front() == Rng(99).uniform_index(40));
  CHECK(s == farthest_point_sampling(cloud, 5, 99));
}

TEST_CASE("fps on a square picks the opposite corner next") {
  const PointCloud sq(std::vector<Point3>{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  const auto s = farthest_point_sampling_from(sq, 4, 0);
  CHECK(s[1] == 2);
  CHECK(s[2] == 1);  // tie between 1 and 3 goes to the lower index
}

TEST_CASE("knn matches the sort oracle, ties by index") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const PointCloud cloud = random_cloud(rng, 8 + rng.uniform_index(57));
    const std::size_t k = 1 + rng.uniform_index(cloud.size());
    const Tensor centers = random_tensor(rng, Shape{3, 3});
    const auto got = knn(cloud, centers, k);
    CHECK(got == serial::knn(cloud, centers, k));
    for (std::size_t c = 0; c < 3; ++c) {
      const auto want = oracle::knn(cloud, {centers.at(c, 0), centers.at(c, 1), centers.at(c, 2)}, k);
      CHECK(std::vector<std::size_t>(got.begin() + c * k, got.begin() + (c + 1) * k) == want);
    }
  }
  const PointCloud dup(std::vector<Point3>{{1, 0, 0}, {0, 0, 0}, {1, 0, 0}});
  CHECK(knn(dup, Tensor::matrix(1, 3, {1, 0, 0}), 2) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("patches are center-relative and contain their center") {
  Rng rng(13);
  const PointCloud cloud = random_cloud(rng, 128);
  const PatchSet ps = build_patches(cloud, 8, 16, 5);
  CHECK(ps.patches.shape() == Shape{8, 16, 3});
  CHECK(ps.centers.shape() == Shape{8, 3});
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(ps.point_index(i, 0) == ps.center_indices[i]);
    for (std::size_t j = 0; j < 16; ++j)
      for (std::size_t d = 0; d < 3; ++d)
        CHECK(ps.patches[(i * 16 + j) * 3 + d] == cloud.point(ps.point_index(i, j))[d] - ps.centers.at(i, d));
  }
  CHECK_THROWS(build_patches(cloud, 200, 16, 0));
  CHECK_THROWS(build_patches(cloud, 8, 0, 0));
  CHECK_THROWS(build_patches(PointCloud{}, 1, 1, 0));
}

TEST_CASE("chamfer matches the double-loop oracle") {
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor a = random_tensor(rng, Shape{1 + rng.uniform_index(32), 3});
    const Tensor b = random_tensor(rng, Shape{1 + rng.uniform_index(32), 3});
    CHECK(std::abs(chamfer_l2(a, b) - oracle::chamfer(oracle::rows(a), oracle::rows(b))) < 1e-12);
  }
  const Tensor a = random_tensor(rng, Shape{9, 3});
  CHECK(chamfer_l2(a, a) == 0.0);
  CHECK_THROWS(chamfer_l2(Tensor(Shape{0, 3}), a));
}

TEST_CASE("batch chamfer averages per-patch values") {
  Rng rng(15);
  const Tensor p = random_tensor(rng, Shape{3, 4, 3});
  const Tensor q = random_tensor(rng, Shape{3, 5, 3});
  Graph g;
  const double got = batch_chamfer(g.constant(p), q).value().item();
  double want = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<Point3> a(4), b(5);
    for (std::size_t j = 0; j < 4; ++j) a[j] = {p[(i * 4 + j) * 3], p[(i * 4 + j) * 3 + 1], p[(i * 4 + j) * 3 + 2]};
    for (std::size_t j = 0; j < 5; ++j) b[j] = {q[(i * 5 + j) * 3], q[(i * 5 + j) * 3 + 1], q[(i * 5 + j) * 3 + 2]};
    want += oracle::chamfer(a, b) / 3.0;
  }
  CHECK(got == doctest::Approx(want).epsilon(1e-13));
  CHECK(batch_chamfer(g.constant(Tensor(Shape{0, 4, 3})), Tensor(Shape{0, 5, 3})).value().item() == 0.0);
}

TEST_CASE("chamfer gradients pass the finite-difference check") {
  for (const GradcheckCase& c : geometry_gradcheck_cases()) {
    const GradcheckResult r = run_gradcheck(c, 23);
    INFO(c.name << " " << r.max_rel_error);
    CHECK(r.passed);
  }
}

TEST_CASE("point clouds reject non-finite coordinates") {
  PointCloud c;
  CHECK_THROWS(c.push_back({0.0, std::nan(""), 0.0}));
}
