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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <unistd.h>

#include "pmae/dataio/dataio.hpp"
#include "test_util.hpp"

using namespace pmae;
namespace fs = std::filesystem;

namespace {

double norm(const Point3& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]); }

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("pmae_dataio_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string error_of(const std::string& path) {
  try {
    load_points(path);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("noise-free spheres lie on the unit sphere") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PointCloud c = gen_synthetic({ShapeFamily::Sphere, 512, 0.0, seed});
    CHECK(c.size() == 512);
    CHECK(c.label == std::size_t{0});
    double zsum = 0.0;
    std::size_t upper = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(norm(c.point(i)) == doctest::Approx(1.0).epsilon(1e-12));
      zsum += c.point(i)[2];
      upper += c.point(i)[2] > 0;
    }
    CHECK(std::abs(zsum / 512) < 0.1);
    CHECK(upper > 200);
    CHECK(upper < 312);
  }
}

TEST_CASE("noise-free planes are flat, other families are not") {
  const PointCloud plane = gen_synthetic({ShapeFamily::Plane, 256, 0.0, 3});
  double max_abs_x = 0.0, max_abs_y = 0.0;
  for (std::size_t i = 0; i < plane.size(); ++i) {
    CHECK(plane.point(i)[2] == 0.0);
    max_abs_x = std::max(max_abs_x, std::abs(plane.point(i)[0]));
    max_abs_y = std::max(max_abs_y, std::abs(plane.point(i)[1]));
  }
  CHECK(max_abs_x > 0.2);
  CHECK(max_abs_y > 0.2);

  for (ShapeFamily f : kAllFamilies) {
    const PointCloud c = gen_synthetic({f, 256, 0.0, 4});
    double max_norm = 0.0, max_abs_z = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      max_norm = std::max(max_norm, norm(c.point(i)));
      max_abs_z = std::max(max_abs_z, std::abs(c.point(i)[2]));
    }
    INFO(to_string(f));
    CHECK(max_norm == doctest::Approx(1.0).epsilon(1e-12));
    if (f != ShapeFamily::Plane) CHECK(max_abs_z > 0.05);
    CHECK(parse_family(to_string(f)) == f);
  }
  CHECK_THROWS(parse_family("teapot"));
}

TEST_CASE("generation is seeded") {
  const SyntheticSpec spec{ShapeFamily::Torus, 128, 0.01, 9};
  CHECK(gen_synthetic(spec).to_tensor() == gen_synthetic(spec).to_tensor());
  SyntheticSpec other = spec;
  other.seed = 10;
  CHECK(!(gen_synthetic(spec).to_tensor() == gen_synthetic(other).to_tensor()));
  CHECK_THROWS(gen_synthetic({ShapeFamily::Cube, 0, 0.0, 1}));
  CHECK_THROWS(gen_synthetic({ShapeFamily::Cube, 8, -1.0, 1}));
}

TEST_CASE("normalization is idempotent and removes translation and scale") {
  Rng rng(5);
  const PointCloud raw = pmae::testing::random_cloud(rng, 200);
  const PointCloud n1 = normalize_cloud(raw);
  const PointCloud n2 = normalize_cloud(n1);
  CHECK(pmae::testing::max_abs_diff(n1.to_tensor(), n2.to_tensor()) < 1e-14);
  const PointCloud moved = normalize_cloud(apply_similarity(raw, 3.5, {10.0, -4.0, 0.25}));
  CHECK(pmae::testing::max_abs_diff(n1.to_tensor(), moved.to_tensor()) < 1e-12);
  Point3 centroid{0, 0, 0};
  double max_norm = 0.0;
  for (std::size_t i = 0; i < n1.size(); ++i) {
    for (int d = 0; d < 3; ++d) centroid[d] += n1.point(i)[d] / 200.0;
    max_norm = std::max(max_norm, norm(n1.point(i)));
  }
  CHECK(norm(centroid) < 1e-14);
  CHECK(max_norm == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS(normalize_cloud(PointCloud{}));
}

TEST_CASE("augmentation is a seeded similarity within range") {
  const PointCloud c = gen_synthetic({ShapeFamily::Cube, 64, 0.0, 1});
  const PointCloud a = augment(c, 77);
  CHECK(a.to_tensor() == augment(c, 77).to_tensor());
  CHECK(!(a.to_tensor() == augment(c, 78).to_tensor()));
  // Recover scale and translation from two points and check the rest.
  const Point3 p0 = c.point(0), p1 = c.point(1), q0 = a.point(0), q1 = a.point(1);
  const double s = (q1[0] - q0[0]) / (p1[0] - p0[0]);
  CHECK(s >= 0.8);
  CHECK(s <= 1.25);
  Point3 t{};
  for (int d = 0; d < 3; ++d) {
    t[d] = q0[d] - s * p0[d];
    CHECK(std::abs(t[d]) <= 0.1 + 1e-12);
  }
  for (std::size_t i = 0; i < c.size(); ++i)
    for (int d = 0; d < 3; ++d) CHECK(a.point(i)[d] == doctest::Approx(s * c.point(i)[d] + t[d]).epsilon(1e-10));
}

TEST_CASE("dataset splits have the requested sizes and distinct seeds") {
  DatasetSpec spec;
  spec.num_classes = 4;
  spec.train_per_class = 3;
  spec.val_per_class = 2;
  spec.test_per_class = 5;
  spec.points = 32;
  {
    const DatasetSplit no_pool = make_synthetic_dataset(spec);
    CHECK(no_pool.pretrain.empty());
    CHECK(&pretraining_pool(no_pool) == &no_pool.train);
  }
  spec.pretrain_per_class = 6;
  const DatasetSplit d = make_synthetic_dataset(spec);
  CHECK(d.pretrain.size() == 24);
  CHECK(&pretraining_pool(d) == &d.pretrain);
  CHECK(d.num_classes == 4);
  CHECK(d.train.size() == 12);
  CHECK(d.val.size() == 8);
  CHECK(d.test.size() == 20);
  std::set<std::uint64_t> seeds;
  std::vector<std::size_t> per_class(4, 0);
  for (const auto* part : {&d.train, &d.val, &d.test, &d.pretrain})
    for (const LabeledCloud& item : *part) {
      seeds.insert(item.seed);
      CHECK(item.cloud.label == item.label);
      CHECK(item.cloud.size() == 32);
      if (part == &d.test) ++per_class[item.label];
    }
  CHECK(seeds.size() == 64);
  for (std::size_t n : per_class) CHECK(n == 5);

  DatasetSpec other = spec;
  other.seed = 1;
  CHECK(!(make_synthetic_dataset(other).train[0].cloud.to_tensor() == d.train[0].cloud.to_tensor()));
  spec.num_classes = 7;
  CHECK_THROWS(make_synthetic_dataset(spec));
}

TEST_CASE("xyz files round trip bit-exactly") {
  const fs::path dir = scratch_dir();
  Rng rng(6);
  const PointCloud c = pmae::testing::random_cloud(rng, 50);
  const std::string path = (dir / "c.xyz").string();
  save_xyz(path, c);
  CHECK(load_points(path).to_tensor() == c.to_tensor());

  write_text(dir / "extra.xyz", "# header\n1 2 3 0.5 0.5\n\n  4 5 6\n");
  const PointCloud e = load_points((dir / "extra.xyz").string());
  CHECK(e.size() == 2);
  CHECK(e.point(1) == Point3{4, 5, 6});

  write_text(dir / "short.xyz", "1 2 3\n1 2 3\n1 2\n");
  CHECK(error_of((dir / "short.xyz").string()).find("short.xyz:3:") != std::string::npos);
  write_text(dir / "bad.xyz", "1 2 3\n1 x 3\n");
  CHECK(error_of((dir / "bad.xyz").string()).find("bad.xyz:2:") != std::string::npos);
  write_text(dir / "nan.xyz", "1 2 nan\n");
  CHECK(error_of((dir / "nan.xyz").string()).find("nan.xyz:1:") != std::string::npos);
  write_text(dir / "empty.xyz", "# nothing\n");
  CHECK_THROWS(load_points((dir / "empty.xyz").string()));
  CHECK_THROWS(load_points((dir / "missing.xyz").string()));
  fs::remove_all(dir);
}

TEST_CASE("ply files: colored ascii round trip, binary input, errors") {
  const fs::path dir = scratch_dir();
  PointCloud a, b;
  a.push_back({0.5, -0.25, 1.0});
  b.push_back({0.125, 2.0, -3.0});
  b.push_back({1.0, 1.0, 1.0});
  const std::string path = (dir / "c.ply").string();
  save_ply(path, {{a, {255, 0, 0}}, {b}});
  const PointCloud back = load_points(path);
  CHECK(back.size() == 3);
  CHECK(back.point(0) == a.point(0));
  CHECK(back.point(2) == b.point(1));

  {
    std::ofstream out(dir / "bin.ply", std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
           "property float z\nproperty uchar red\nend_header\n";
    const float v[6] = {1.5f, -2.0f, 0.25f, 3.0f, 4.0f, 5.0f};
    for (int i = 0; i < 2; ++i) {
      out.write(reinterpret_cast<const char*>(&v[3 * i]), 3 * sizeof(float));
      out.put(static_cast<char>(7));
    }
  }
  const PointCloud bin = load_points((dir / "bin.ply").string());
  CHECK(bin.size() == 2);
  CHECK(bin.point(0) == Point3{1.5, -2.0, 0.25});
  CHECK(bin.point(1) == Point3{3.0, 4.0, 5.0});

  write_text(dir / "magic.ply", "plx\n");
  CHECK(error_of((dir / "magic.ply").string()).find("magic.ply:1:") != std::string::npos);
  write_text(dir / "kw.ply", "ply\nformat ascii 1.0\nelement vertex 1\nbogus\n");
  CHECK(error_of((dir / "kw.ply").string()).find("kw.ply:4:") != std::string::npos);
  write_text(dir / "row.ply",
             "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\n"
             "end_header\n1 2 3\n1 2\n");
  CHECK(error_of((dir / "row.ply").string()).find("row.ply:9:") != std::string::npos);
  write_text(dir / "noxyz.ply",
             "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nend_header\n1 2\n");
  CHECK(!error_of((dir / "noxyz.ply").string()).empty());
  fs::remove_all(dir);
}
